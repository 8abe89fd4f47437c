#include "dinterp/dinterp1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "dinterp/error.hpp"

namespace dinterp {

namespace {

void check_lambda(double lambda) {
  require(std::isfinite(lambda) && lambda >= 0.0 && lambda <= 1.0, ErrorCode::InvalidArgument,
          "interpolation parameter must lie in [0, 1]");
}

QuantileCurve quantile_of(const PwcFunction1D& u) { return pseudo_inverse(cdf(u)); }

// Cell values of a barycenter either come straight from differencing the
// combined CDF, which conserves every cell mass exactly, or are re-evaluated
// from the operands for pointwise accuracy. Inside one output cell every
// operand's quantile is linear with slope M_i / v_i, so the value is
// M / sum_i w_i M_i / v_i; this avoids the cancellation in differencing
// cumulative sums on fine grids, at the price of cell masses that carry the
// rounding of the node positions.
enum class CellValues { ExactMass, Pointwise };

// Weighted barycenter of nonnegative densities; weights must already be validated.
PwcFunction1D bary_nonneg(std::span<const PwcFunction1D> us, std::span<const double> weights,
                          CellValues mode = CellValues::Pointwise) {
  std::vector<PwlCdf> cdfs;
  std::vector<const PwcFunction1D*> members;
  std::vector<QuantileCurve> curves;
  std::vector<double> w;
  double mass = 0.0;
  for (std::size_t i = 0; i < us.size(); ++i) {
    if (weights[i] == 0.0) continue;
    cdfs.push_back(cdf(us[i]));
    members.push_back(&us[i]);
    curves.push_back(pseudo_inverse(cdfs.back()));
    w.push_back(weights[i]);
    mass += weights[i] * cdfs.back().total_mass();
  }
  double wsum = 0.0;
  for (double x : w) wsum += x;

  const PwlCdf out = quantile_to_cdf(combine(curves, w), mass);
  PwcFunction1D shape = density_from_cdf(out);
  if (mode == CellValues::ExactMass) return shape;

  std::vector<double> values(shape.values().begin(), shape.values().end());
  const auto xs = out.xs();
  const auto fs = out.fractions();
  std::size_t cell = 0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    if (xs[k + 1] <= xs[k]) continue;
    if (fs[k + 1] > fs[k]) {
      const double y = 0.5 * (fs[k] + fs[k + 1]);
      double stretch = 0.0;
      for (std::size_t i = 0; i < cdfs.size() && std::isfinite(stretch); ++i) {
        const auto f = cdfs[i].fractions();
        const auto it = std::upper_bound(f.begin(), f.end(), y);
        const std::size_t j = static_cast<std::size_t>(it - f.begin()) - 1;
        const double v = members[i]->value(std::min(j, members[i]->cells() - 1));
        stretch = v > 0.0 ? stretch + (w[i] / wsum) * cdfs[i].total_mass() / v
                          : std::numeric_limits<double>::infinity();
      }
      if (std::isfinite(stretch) && stretch > 0.0) values[cell] = mass / stretch;
    }
    ++cell;
  }
  return PwcFunction1D(shape.grid(), std::move(values));
}

// Rounding in sampled signals leaves relative noise of order 1e-13 in the
// slopes. Hold the previous slope while changes stay below a relative floor so
// that second differences are exact jumps and the sign components balance.
std::vector<double> hold_slopes(std::vector<double> v) {
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, std::abs(x));
  const double floor = 1e-12 * peak;
  double held = 0.0;
  for (double& x : v) {
    if (std::abs(x - held) <= floor) {
      x = held;
    } else {
      held = x;
    }
  }
  return v;
}

std::vector<double> positive_part(std::span<const double> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i], 0.0);
  return out;
}

std::vector<double> negative_part(std::span<const double> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(-v[i], 0.0);
  return out;
}

bool all_zero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

}  // namespace

SignedParts split_signs(const PwcFunction1D& u) {
  PwcFunction1D plus(u.grid(), positive_part(u.values()));
  PwcFunction1D minus(u.grid(), negative_part(u.values()));
  const double mp = plus.mass();
  const double mm = minus.mass();
  return {std::move(plus), std::move(minus), mp, mm};
}

bool vanishes(const PwcFunction1D& part, const PwcFunction1D& whole) {
  return part.mass() <= zero_mass_threshold(whole);
}

// ---------------------------------------------------------------- weights

InterpWeights::InterpWeights(std::vector<double> lambdas) : lambdas_(std::move(lambdas)) {
  require(!lambdas_.empty(), ErrorCode::WeightSum, "at least one weight is required");
  double total = 0.0;
  for (double l : lambdas_) {
    require(std::isfinite(l) && l >= 0.0, ErrorCode::WeightSum, "weights must be finite and nonnegative");
    total += l;
  }
  require(std::abs(total - 1.0) <= 1e-12, ErrorCode::WeightSum, "weights must sum to one");
}

InterpWeights InterpWeights::pair(double lambda) {
  check_lambda(lambda);
  return InterpWeights({1.0 - lambda, lambda});
}

InterpWeights InterpWeights::vertex(std::size_t k, std::size_t n) {
  require(k < n, ErrorCode::OutOfRange, "vertex index outside the family");
  std::vector<double> w(n, 0.0);
  w[k] = 1.0;
  return InterpWeights(std::move(w));
}

InterpWeights barycentric_weights(std::span<const double> alpha, const std::vector<std::vector<double>>& nodes,
                                  const std::vector<std::vector<std::size_t>>& simplices) {
  const std::size_t dim = alpha.size();
  require(dim >= 1, ErrorCode::InvalidArgument, "parameter point must have at least one coordinate");
  for (const auto& n : nodes) {
    require(n.size() == dim, ErrorCode::ShapeMismatch, "node dimension differs from the parameter point");
  }
  std::vector<std::vector<std::size_t>> order;
  for (auto s : simplices) {
    require(s.size() == dim + 1, ErrorCode::ShapeMismatch, "simplex must have dim + 1 vertices");
    for (std::size_t idx : s) require(idx < nodes.size(), ErrorCode::OutOfRange, "simplex vertex index out of range");
    std::sort(s.begin(), s.end());
    order.push_back(std::move(s));
  }
  std::sort(order.begin(), order.end());

  for (const auto& s : order) {
    Eigen::MatrixXd a(dim + 1, dim + 1);
    Eigen::VectorXd rhs(dim + 1);
    for (std::size_t v = 0; v <= dim; ++v) {
      for (std::size_t d = 0; d < dim; ++d) a(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(v)) = nodes[s[v]][d];
      a(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(v)) = 1.0;
    }
    for (std::size_t d = 0; d < dim; ++d) rhs(static_cast<Eigen::Index>(d)) = alpha[d];
    rhs(static_cast<Eigen::Index>(dim)) = 1.0;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd l = lu.solve(rhs);
    if (l.minCoeff() < -1e-12) continue;
    std::vector<double> w(nodes.size(), 0.0);
    double total = 0.0;
    for (std::size_t v = 0; v <= dim; ++v) {
      const double lv = std::max(0.0, l(static_cast<Eigen::Index>(v)));
      w[s[v]] = lv;
      total += lv;
    }
    for (double& x : w) x /= total;
    return InterpWeights(std::move(w));
  }
  fail(ErrorCode::OutOfRange, "parameter point lies outside every simplex of the tessellation");
}

// ---------------------------------------------------------------- pair interpolation

PwcFunction1D interp_nonneg(const PwcFunction1D& u1, const PwcFunction1D& u2, double lambda) {
  check_lambda(lambda);
  if (lambda == 0.0) return u1;
  if (lambda == 1.0) return u2;
  const PwcFunction1D pair[] = {u1, u2};
  const double w[] = {1.0 - lambda, lambda};
  return bary_nonneg(pair, w);
}

double beta_coefficient(double /*m1_plus*/, double m1_minus, double m2_plus, double m2_minus, double lambda) {
  check_lambda(lambda);
  const double den = (1.0 - lambda) * m1_minus + lambda * m2_plus;
  require(den > 0.0, ErrorCode::DegenerateDenominator, "opposite-sign pairing carries no mass");
  return ((1.0 - lambda) * m1_minus + lambda * m2_minus) / den;
}

PwcFunction1D interp_signed(const PwcFunction1D& u1, const PwcFunction1D& u2, double lambda) {
  check_lambda(lambda);
  if (lambda == 0.0) return u1;
  if (lambda == 1.0) return u2;

  const SignedParts a = split_signs(u1);
  const SignedParts b = split_signs(u2);
  const bool a_plus = !vanishes(a.plus, u1), a_minus = !vanishes(a.minus, u1);
  const bool b_plus = !vanishes(b.plus, u2), b_minus = !vanishes(b.minus, u2);
  require(a_plus || a_minus, ErrorCode::BothPartsZero, "first operand is identically zero");
  require(b_plus || b_minus, ErrorCode::BothPartsZero, "second operand is identically zero");

  // Positive part of the interpolant.
  std::optional<PwcFunction1D> plus;
  if (a_plus && b_plus) {
    plus = interp_nonneg(a.plus, b.plus, lambda);
  } else if (a_plus) {
    const double beta = beta_coefficient(a.mass_minus, a.mass_plus, b.mass_minus, b.mass_plus, lambda);
    plus = scaled(interp_nonneg(a.plus, b.minus, lambda), beta);
  } else if (b_plus) {
    const double beta = beta_coefficient(b.mass_minus, b.mass_plus, a.mass_minus, a.mass_plus, 1.0 - lambda);
    plus = scaled(interp_nonneg(a.minus, b.plus, lambda), beta);
  }

  // Negative part (as a magnitude).
  std::optional<PwcFunction1D> minus;
  if (a_minus && b_minus) {
    minus = interp_nonneg(a.minus, b.minus, lambda);
  } else if (a_minus) {
    const double beta = beta_coefficient(a.mass_plus, a.mass_minus, b.mass_plus, b.mass_minus, lambda);
    minus = scaled(interp_nonneg(a.minus, b.plus, lambda), beta);
  } else if (b_minus) {
    const double beta = beta_coefficient(b.mass_plus, b.mass_minus, a.mass_plus, a.mass_minus, 1.0 - lambda);
    minus = scaled(interp_nonneg(a.plus, b.minus, lambda), beta);
  }

  if (plus && minus) return linear_combination(1.0, *plus, -1.0, *minus);
  if (plus) return *plus;
  return scaled(*minus, -1.0);
}

PwcFunction1D interp_bary(std::span<const PwcFunction1D> us, const InterpWeights& weights) {
  require(us.size() == weights.size(), ErrorCode::ShapeMismatch, "one weight per member is required");
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < us.size(); ++i) {
    if (weights[i] > 0.0) active.push_back(i);
  }
  if (active.size() == 1) return us[active.front()];
  if (active.size() == 2) {
    const double wa = weights[active[0]], wb = weights[active[1]];
    return interp_signed(us[active[0]], us[active[1]], wb / (wa + wb));
  }

  std::vector<PwcFunction1D> plus, minus;
  std::vector<double> w;
  std::size_t with_plus = 0, with_minus = 0;
  for (std::size_t i : active) {
    SignedParts p = split_signs(us[i]);
    const bool has_plus = !vanishes(p.plus, us[i]);
    const bool has_minus = !vanishes(p.minus, us[i]);
    require(has_plus || has_minus, ErrorCode::BothPartsZero,
            "member " + std::to_string(i) + " is identically zero");
    with_plus += has_plus ? 1 : 0;
    with_minus += has_minus ? 1 : 0;
    plus.push_back(std::move(p.plus));
    minus.push_back(std::move(p.minus));
    w.push_back(weights[i]);
  }
  const std::size_t n = active.size();
  const bool use_plus = with_plus == n;
  const bool use_minus = with_minus == n;
  // Every member must contribute to each part that is used, and each part
  // that is not used must vanish in every member.
  if (!((use_plus || with_plus == 0) && (use_minus || with_minus == 0))) {
    fail(ErrorCode::UnsupportedSignPattern,
         "signed members must either all carry or all lack each sign part (" + std::to_string(with_plus) + " of " +
             std::to_string(n) + " have a positive part, " + std::to_string(with_minus) + " a negative part)");
  }
  if (use_plus && use_minus) {
    return linear_combination(1.0, bary_nonneg(plus, w), -1.0, bary_nonneg(minus, w));
  }
  if (use_plus) return bary_nonneg(plus, w);
  return scaled(bary_nonneg(minus, w), -1.0);
}

// ---------------------------------------------------------------- derivative split

std::vector<double> difference(std::span<const double> values, const Grid1D& grid) {
  require(values.size() == grid.cells(), ErrorCode::ShapeMismatch, "value count does not match the grid");
  std::vector<double> out(values.size());
  double prev = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    out[j] = (values[j] - prev) / grid.width(j);
    prev = values[j];
  }
  return out;
}

std::vector<double> cumulative(std::span<const double> rates, const Grid1D& grid) {
  require(rates.size() == grid.cells(), ErrorCode::ShapeMismatch, "value count does not match the grid");
  std::vector<double> out(rates.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < rates.size(); ++j) {
    acc += rates[j] * grid.width(j);
    out[j] = acc;
  }
  return out;
}

PwcFunction1D interp_derivative_split(const PwcFunction1D& p1, const PwcFunction1D& p2, double lambda) {
  check_lambda(lambda);
  require(p1.grid() == p2.grid(), ErrorCode::DomainMismatch, "derivative split needs both signals on one grid");
  if (lambda == 0.0) return p1;
  if (lambda == 1.0) return p2;
  const Grid1D& grid = p1.grid();

  struct Components {
    std::vector<double> c[4];  // d+d+, d+d-, d-d+, d-d-
  };
  auto components = [&](const PwcFunction1D& p) {
    const auto d = hold_slopes(difference(p.values(), grid));
    const auto dd_plus = difference(positive_part(d), grid);
    const auto dd_minus = difference(negative_part(d), grid);
    Components out;
    out.c[0] = positive_part(dd_plus);
    out.c[1] = negative_part(dd_plus);
    out.c[2] = positive_part(dd_minus);
    out.c[3] = negative_part(dd_minus);
    return out;
  };
  const Components a = components(p1);
  const Components b = components(p2);

  static constexpr const char* kNames[] = {"d+d+", "d+d-", "d-d+", "d-d-"};
  static constexpr double kSigns[] = {1.0, -1.0, -1.0, 1.0};
  std::vector<double> second(grid.cells(), 0.0);
  for (int k = 0; k < 4; ++k) {
    const bool za = all_zero(a.c[k]), zb = all_zero(b.c[k]);
    if (za && zb) continue;
    if (za != zb) {
      fail(ErrorCode::MismatchedComponents,
           std::string("component ") + kNames[k] + " vanishes in " + (za ? "the first" : "the second") +
               " signal only");
    }
    const PwcFunction1D ua(grid, a.c[k]), ub(grid, b.c[k]);
    // The components are integrated twice, so any mass imbalance between them
    // would grow into a linear drift; keep cell masses exact.
    const PwcFunction1D pair[] = {ua, ub};
    const double w[] = {1.0 - lambda, lambda};
    const PwcFunction1D mid = resample(bary_nonneg(pair, w, CellValues::ExactMass), grid);
    for (std::size_t j = 0; j < second.size(); ++j) second[j] += kSigns[k] * mid.value(j);
  }
  return PwcFunction1D(grid, cumulative(cumulative(second, grid), grid));
}

std::vector<double> transport_map(const PwcFunction1D& u1, const PwcFunction1D& u2) {
  const PwlCdf c1 = cdf(u1);
  const QuantileCurve q2 = quantile_of(u2);
  std::vector<double> out(c1.size());
  for (std::size_t j = 0; j < c1.size(); ++j) out[j] = q2.right_limit(c1.fraction(j));
  return out;
}

}  // namespace dinterp
