#include "dinterp/grid1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dinterp/error.hpp"

namespace dinterp {

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

struct Node {
  double y;
  double x;
};

}  // namespace

// ---------------------------------------------------------------- Grid1D

Grid1D::Grid1D(std::vector<double> edges) : edges_(std::move(edges)) {
  require(edges_.size() >= 2, ErrorCode::InvalidArgument, "a grid needs at least one cell");
  require(all_finite(edges_), ErrorCode::InvalidArgument, "grid edges must be finite");
  for (std::size_t j = 0; j + 1 < edges_.size(); ++j) {
    if (!(edges_[j] < edges_[j + 1])) fail(ErrorCode::InvalidArgument,
            "grid edges must be strictly increasing (edge " + std::to_string(j) + ")");
  }
}

Grid1D Grid1D::uniform(double a, double b, std::size_t cells) {
  require(cells >= 1, ErrorCode::InvalidArgument, "uniform grid needs at least one cell");
  require(a < b, ErrorCode::InvalidArgument, "uniform grid needs a < b");
  std::vector<double> edges(cells + 1);
  const double len = b - a;
  for (std::size_t j = 0; j <= cells; ++j) {
    edges[j] = a + len * static_cast<double>(j) / static_cast<double>(cells);
  }
  edges.back() = b;
  return Grid1D(std::move(edges));
}

bool Grid1D::is_uniform(double rtol) const {
  const double h = length() / static_cast<double>(cells());
  for (std::size_t j = 0; j < cells(); ++j) {
    if (std::abs(width(j) - h) > rtol * h) return false;
  }
  return true;
}

// ---------------------------------------------------------------- PwcFunction1D

PwcFunction1D::PwcFunction1D(Grid1D grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!(values_.size() == grid_.cells())) fail(ErrorCode::ShapeMismatch,
          "expected " + std::to_string(grid_.cells()) + " cell values, got " + std::to_string(values_.size()));
  require(all_finite(values_), ErrorCode::InvalidArgument, "cell values must be finite");
}

PwcFunction1D PwcFunction1D::zeros(Grid1D grid) {
  const std::size_t n = grid.cells();
  return PwcFunction1D(std::move(grid), std::vector<double>(n, 0.0));
}

double PwcFunction1D::mass() const {
  double m = 0.0;
  for (std::size_t j = 0; j < values_.size(); ++j) m += values_[j] * grid_.width(j);
  return m;
}

double PwcFunction1D::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double PwcFunction1D::evaluate(double x) const {
  const auto e = grid_.edges();
  if (x < e.front() || x >= e.back()) return 0.0;
  const auto it = std::upper_bound(e.begin(), e.end(), x);
  return values_[static_cast<std::size_t>(it - e.begin()) - 1];
}

double zero_mass_threshold(const PwcFunction1D& u) {
  return kZeroMassRel * u.grid().length() * u.max_abs();
}

// ---------------------------------------------------------------- PwlCdf

PwlCdf::PwlCdf(std::vector<double> xs, std::vector<double> fractions, double total_mass)
    : xs_(std::move(xs)), fractions_(std::move(fractions)), total_mass_(total_mass) {
  require(xs_.size() == fractions_.size() && xs_.size() >= 2, ErrorCode::InvariantViolation,
          "CDF needs at least two (x, U) nodes of matching length");
  require(all_finite(xs_) && all_finite(fractions_), ErrorCode::InvariantViolation, "CDF nodes must be finite");
  require(std::isfinite(total_mass_) && total_mass_ > 0.0, ErrorCode::InvariantViolation,
          "CDF total mass must be positive");
  require(fractions_.front() == 0.0 && fractions_.back() == 1.0, ErrorCode::InvariantViolation,
          "normalized CDF must run from 0 to 1");
  for (std::size_t j = 1; j < xs_.size(); ++j) {
    if (!(xs_[j] >= xs_[j - 1])) fail(ErrorCode::InvariantViolation,
            "CDF x-nodes must be non-decreasing (node " + std::to_string(j) + ")");
    if (!(fractions_[j] >= fractions_[j - 1])) fail(ErrorCode::InvariantViolation,
            "CDF values must be non-decreasing (node " + std::to_string(j) + ")");
  }
}

double PwlCdf::evaluate(double x) const {
  if (x < xs_.front()) return 0.0;
  if (x >= xs_.back()) return total_mass_;
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs_.begin());
  const double x0 = xs_[i - 1], x1 = xs_[i];
  const double f = fractions_[i - 1] + (fractions_[i] - fractions_[i - 1]) * (x - x0) / (x1 - x0);
  return f * total_mass_;
}

// ---------------------------------------------------------------- QuantileCurve

QuantileCurve::QuantileCurve(std::vector<double> ys, std::vector<double> xs) : ys_(std::move(ys)), xs_(std::move(xs)) {
  require(ys_.size() == xs_.size() && ys_.size() >= 2, ErrorCode::InvariantViolation,
          "quantile curve needs at least two (y, x) nodes of matching length");
  require(all_finite(ys_) && all_finite(xs_), ErrorCode::InvariantViolation, "quantile nodes must be finite");
  require(ys_.front() == 0.0 && ys_.back() == 1.0, ErrorCode::InvariantViolation,
          "quantile curve must span y in [0, 1]");
  for (std::size_t i = 1; i < ys_.size(); ++i) {
    if (!(ys_[i] >= ys_[i - 1])) fail(ErrorCode::InvariantViolation,
            "quantile y-nodes must be non-decreasing (node " + std::to_string(i) + ")");
    if (!(xs_[i] >= xs_[i - 1])) fail(ErrorCode::InvariantViolation,
            "quantile x-nodes must be non-decreasing (node " + std::to_string(i) + ")");
  }
}

QuantileCurve QuantileCurve::identity(double a, double b) { return QuantileCurve({0.0, 1.0}, {a, b}); }

double QuantileCurve::left_limit(double y) const {
  require(y >= 0.0 && y <= 1.0, ErrorCode::OutOfRange, "quantile level outside [0, 1]");
  const auto it = std::lower_bound(ys_.begin(), ys_.end(), y);
  const std::size_t i = static_cast<std::size_t>(it - ys_.begin());
  if (ys_[i] == y) return xs_[i];
  const double t = (y - ys_[i - 1]) / (ys_[i] - ys_[i - 1]);
  return xs_[i - 1] + (xs_[i] - xs_[i - 1]) * t;
}

double QuantileCurve::right_limit(double y) const {
  require(y >= 0.0 && y <= 1.0, ErrorCode::OutOfRange, "quantile level outside [0, 1]");
  const auto it = std::upper_bound(ys_.begin(), ys_.end(), y);
  const std::size_t i = static_cast<std::size_t>(it - ys_.begin());
  if (ys_[i - 1] == y) return xs_[i - 1];
  const double t = (y - ys_[i - 1]) / (ys_[i] - ys_[i - 1]);
  return xs_[i - 1] + (xs_[i] - xs_[i - 1]) * t;
}

std::vector<Jump> QuantileCurve::jumps() const {
  std::vector<Jump> out;
  std::size_t i = 0;
  while (i < ys_.size()) {
    std::size_t k = i;
    while (k + 1 < ys_.size() && ys_[k + 1] == ys_[i]) ++k;
    if (xs_[k] > xs_[i]) out.push_back({ys_[i], xs_[i], xs_[k]});
    i = k + 1;
  }
  return out;
}

// ---------------------------------------------------------------- conversions

PwlCdf cdf(const PwcFunction1D& u) {
  const auto& grid = u.grid();
  const std::size_t n = u.cells();
  std::vector<double> running(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double v = u.value(j);
    if (v < 0.0) {
      if (!(v >= -kNegativeClip)) fail(ErrorCode::NegativeValue,
              "cell " + std::to_string(j) + " has negative value " + std::to_string(v));
      v = 0.0;
    }
    running[j + 1] = running[j] + v * grid.width(j);
  }
  const double mass = running[n];
  require(mass > zero_mass_threshold(u) && mass > 0.0, ErrorCode::ZeroMass, "density has no mass");
  std::vector<double> fractions(n + 1);
  for (std::size_t j = 0; j <= n; ++j) fractions[j] = running[j] / mass;
  fractions.back() = 1.0;
  const auto e = grid.edges();
  return PwlCdf(std::vector<double>(e.begin(), e.end()), std::move(fractions), mass);
}

QuantileCurve pseudo_inverse(const PwlCdf& cdf) {
  const auto f = cdf.fractions();
  const auto x = cdf.xs();
  return QuantileCurve(std::vector<double>(f.begin(), f.end()), std::vector<double>(x.begin(), x.end()));
}

QuantileCurve combine(std::span<const QuantileCurve> curves, std::span<const double> weights) {
  require(!curves.empty(), ErrorCode::WeightSum, "combine needs at least one curve");
  require(curves.size() == weights.size(), ErrorCode::WeightSum, "one weight per curve is required");
  double total = 0.0;
  for (double w : weights) {
    require(std::isfinite(w) && w >= 0.0, ErrorCode::WeightSum, "weights must be finite and nonnegative");
    total += w;
  }
  require(std::abs(total - 1.0) <= 1e-12, ErrorCode::WeightSum, "weights must sum to one");

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    if (weights[i] > 0.0) active.push_back(i);
  }
  if (active.size() == 1) return curves[active.front()];

  std::vector<double> levels;
  for (std::size_t i : active) levels.insert(levels.end(), curves[i].ys().begin(), curves[i].ys().end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  // Levels closer than kCoincidentY are one breakpoint seen through roundoff
  // in different inputs; each cluster becomes a single output level, and a
  // curve with nodes inside the cluster contributes its first and last node.
  struct Cluster {
    double lo, hi, out;
  };
  std::vector<Cluster> clusters;
  for (double y : levels) {
    if (!clusters.empty() && y - clusters.back().lo <= kCoincidentY) {
      clusters.back().hi = y;
    } else {
      clusters.push_back({y, y, y});
    }
  }
  clusters.back().out = 1.0;

  std::vector<std::size_t> cursor(active.size(), 0);
  std::vector<Node> nodes;
  nodes.reserve(2 * clusters.size());
  for (const Cluster& cl : clusters) {
    double xl = 0.0, xr = 0.0;
    for (std::size_t a = 0; a < active.size(); ++a) {
      const auto& c = curves[active[a]];
      const auto ys = c.ys();
      const auto xs = c.xs();
      const double w = weights[active[a]] / total;
      std::size_t& pos = cursor[a];
      while (ys[pos] < cl.lo) ++pos;
      double left, right;
      if (ys[pos] <= cl.hi) {
        std::size_t end = pos;
        while (end + 1 < ys.size() && ys[end + 1] <= cl.hi) ++end;
        left = xs[pos];
        right = xs[end];
      } else {
        const double t = (cl.lo - ys[pos - 1]) / (ys[pos] - ys[pos - 1]);
        left = right = xs[pos - 1] + (xs[pos] - xs[pos - 1]) * t;
      }
      xl += w * left;
      xr += w * right;
    }
    nodes.push_back({cl.out, xl});
    if (xr > xl) nodes.push_back({cl.out, xr});
  }

  // Rounding in the weighted sums can leave x flat (or a ulp backwards) across
  // y-breakpoints that nearly coincide; fold those into a single level.
  std::vector<Node> clean;
  clean.reserve(nodes.size());
  clean.push_back(nodes.front());
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    Node node = nodes[k];
    node.x = std::max(node.x, clean.back().x);
    const Node& prev = clean.back();
    if (node.y == prev.y && node.x == prev.x) continue;
    if (node.y > prev.y && node.y - prev.y <= kCoincidentY && node.x == prev.x) {
      if (k + 1 < nodes.size()) continue;
      clean.pop_back();
    }
    clean.push_back(node);
  }

  std::vector<double> ys(clean.size()), xs(clean.size());
  for (std::size_t k = 0; k < clean.size(); ++k) {
    ys[k] = clean[k].y;
    xs[k] = clean[k].x;
  }
  return QuantileCurve(std::move(ys), std::move(xs));
}

PwlCdf quantile_to_cdf(const QuantileCurve& curve, double mass) {
  require(std::isfinite(mass) && mass > 0.0, ErrorCode::InvalidArgument, "mass must be positive");
  const auto ys = curve.ys();
  const auto xs = curve.xs();
  std::vector<double> x, f;
  x.reserve(ys.size());
  f.reserve(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (!x.empty() && x.back() == xs[i] && f.back() == ys[i]) continue;
    x.push_back(xs[i]);
    f.push_back(ys[i]);
  }
  return PwlCdf(std::move(x), std::move(f), mass);
}

PwcFunction1D density_from_cdf(const PwlCdf& cdf) {
  const auto xs = cdf.xs();
  const auto f = cdf.fractions();
  const double mass = cdf.total_mass();
  std::vector<double> edges{xs.front()};
  std::vector<double> values;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double dx = xs[k + 1] - xs[k];
    const double df = f[k + 1] - f[k];
    if (dx <= 0.0) {
      if (!(df <= 0.0)) fail(ErrorCode::PointMass,
              "CDF rises by " + std::to_string(df * mass) + " at x = " + std::to_string(xs[k]));
      continue;
    }
    edges.push_back(xs[k + 1]);
    values.push_back(df * mass / dx);
  }
  require(!values.empty(), ErrorCode::PointMass, "all mass is concentrated at a single point");
  return PwcFunction1D(Grid1D(std::move(edges)), std::move(values));
}

PwcFunction1D resample(const PwcFunction1D& u, const Grid1D& target) {
  const auto e = u.grid().edges();
  const auto t = target.edges();
  const std::size_t ns = u.cells();
  const std::size_t nt = target.cells();

  double outside = 0.0, total = 0.0;
  for (std::size_t j = 0; j < ns; ++j) {
    const double v = std::abs(u.value(j));
    total += v * (e[j + 1] - e[j]);
    const double lo = std::max(e[j], t.front());
    const double hi = std::min(e[j + 1], t.back());
    outside += v * ((e[j + 1] - e[j]) - std::max(0.0, hi - lo));
  }
  if (!(outside <= 1e-14 * total)) fail(ErrorCode::DomainMismatch,
          "target grid [" + std::to_string(t.front()) + ", " + std::to_string(t.back()) +
              "] does not cover the support of the function");

  std::vector<double> out(nt, 0.0);
  std::size_t i = 0;
  for (std::size_t k = 0; k < nt; ++k) {
    const double lo = t[k], hi = t[k + 1];
    while (i < ns && e[i + 1] <= lo) ++i;
    double integral = 0.0;
    bool uniform = true;
    double first = 0.0;
    bool seen = false;
    for (std::size_t s = i; s < ns && e[s] < hi; ++s) {
      const double a = std::max(lo, e[s]);
      const double b = std::min(hi, e[s + 1]);
      if (b <= a) continue;
      integral += u.value(s) * (b - a);
      if (!seen) {
        first = u.value(s);
        seen = true;
      } else if (u.value(s) != first) {
        uniform = false;
      }
    }
    const bool covered = e.front() <= lo && e.back() >= hi;
    out[k] = (seen && uniform && covered) ? first : integral / (hi - lo);
  }
  return PwcFunction1D(target, std::move(out));
}

PwcFunction1D linear_combination(double a, const PwcFunction1D& u, double b, const PwcFunction1D& v) {
  const auto eu = u.grid().edges();
  const auto ev = v.grid().edges();
  std::vector<double> edges;
  edges.reserve(eu.size() + ev.size());
  std::merge(eu.begin(), eu.end(), ev.begin(), ev.end(), std::back_inserter(edges));
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<double> values(edges.size() - 1, 0.0);
  std::size_t iu = 0, iv = 0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double lo = edges[k];
    double val = 0.0;
    while (iu < u.cells() && eu[iu + 1] <= lo) ++iu;
    while (iv < v.cells() && ev[iv + 1] <= lo) ++iv;
    if (iu < u.cells() && eu[iu] <= lo) val += a * u.value(iu);
    if (iv < v.cells() && ev[iv] <= lo) val += b * v.value(iv);
    values[k] = val;
  }
  return PwcFunction1D(Grid1D(std::move(edges)), std::move(values));
}

PwcFunction1D scaled(const PwcFunction1D& u, double factor) {
  std::vector<double> values(u.values().begin(), u.values().end());
  for (double& v : values) v *= factor;
  return PwcFunction1D(u.grid(), std::move(values));
}

}  // namespace dinterp
