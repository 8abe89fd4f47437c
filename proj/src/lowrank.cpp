#include "dinterp/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dinterp/error.hpp"

namespace dinterp {

std::vector<double> interior_levels(std::size_t count) {
  require(count >= 1, ErrorCode::InvalidArgument, "need at least one sample level");
  std::vector<double> out(count);
  for (std::size_t q = 0; q < count; ++q) out[q] = (static_cast<double>(q) + 0.5) / static_cast<double>(count);
  return out;
}

std::vector<double> sample_quantile(const QuantileCurve& curve, std::span<const double> levels) {
  std::vector<double> out(levels.size());
  for (std::size_t q = 0; q < levels.size(); ++q) {
    const double y = levels[q];
    if (!(y > 0.0 && y < 1.0)) fail(ErrorCode::OutOfRange, "sample level " + std::to_string(y) + " outside (0, 1)");
    if (q > 0 && y < levels[q - 1]) fail(ErrorCode::InvalidArgument, "sample levels must be sorted");
    out[q] = curve.right_limit(y);
  }
  return out;
}

SnapshotMatrix build_snapshots(std::span<const QuantileCurve> curves, std::span<const double> levels) {
  require(curves.size() >= 2, ErrorCode::InvalidArgument, "snapshot matrix needs at least two curves");
  const std::vector<double> ref = sample_quantile(curves[0], levels);
  const Eigen::Map<const Eigen::VectorXd> r(ref.data(), static_cast<Eigen::Index>(ref.size()));

  SnapshotMatrix out{Eigen::MatrixXd(), std::vector<double>(levels.begin(), levels.end()), curves[0], {}, {}, {}};
  std::vector<Eigen::VectorXd> columns;
  for (std::size_t k = 1; k < curves.size(); ++k) {
    const std::vector<double> s = sample_quantile(curves[k], levels);
    const Eigen::Map<const Eigen::VectorXd> sv(s.data(), static_cast<Eigen::Index>(s.size()));
    Eigen::VectorXd d = sv - r;
    const double norm = d.norm();
    if (norm <= 1e-14 * (r.norm() + sv.norm())) {
      out.warnings.push_back("curve " + std::to_string(k) + " coincides with the reference; column dropped");
      continue;
    }
    columns.push_back(d / norm);
    out.members.push_back(k);
    out.column_norms.push_back(norm);
  }
  if (columns.empty()) fail(ErrorCode::AllIdentical, "every curve coincides with the reference");
  require(levels.size() >= columns.size(), ErrorCode::InvalidArgument,
          "need at least as many sample levels as snapshot columns");
  out.data.resize(static_cast<Eigen::Index>(levels.size()), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) out.data.col(static_cast<Eigen::Index>(k)) = columns[k];
  return out;
}

SvdResult jacobi_svd(const Eigen::MatrixXd& input, std::size_t max_sweeps) {
  const Eigen::Index m = input.rows(), n = input.cols();
  require(n >= 1 && m >= n, ErrorCode::InvalidArgument, "Jacobi SVD needs a nonempty matrix with rows >= cols");
  require(input.allFinite(), ErrorCode::InvalidArgument, "matrix has non-finite entries");
  Eigen::MatrixXd a = input;
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double frob2 = a.squaredNorm();
  constexpr double kRotate = 1e-15;

  SvdResult out;
  bool rotated = true;
  while (rotated && out.sweeps < max_sweeps) {
    rotated = false;
    ++out.sweeps;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double alpha = a.col(i).squaredNorm();
        const double beta = a.col(j).squaredNorm();
        const double gamma = a.col(i).dot(a.col(j));
        if (gamma == 0.0 || std::abs(gamma) <= kRotate * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::Index r = 0; r < m; ++r) {
          const double ai = a(r, i), aj = a(r, j);
          a(r, i) = c * ai - s * aj;
          a(r, j) = s * ai + c * aj;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
          const double vi = v(r, i), vj = v(r, j);
          v(r, i) = c * vi - s * vj;
          v(r, j) = s * vi + c * vj;
        }
      }
    }
  }
  double off2 = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double g = a.col(i).dot(a.col(j));
      off2 += g * g;
    }
  }
  if (frob2 > 0.0 && std::sqrt(off2) > 1e-12 * frob2) {
    fail(ErrorCode::ConvergenceFailure, "Jacobi SVD did not converge in " + std::to_string(max_sweeps) + " sweeps");
  }

  std::vector<double> sigma(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) sigma[static_cast<std::size_t>(i)] = a.col(i).norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return sigma[static_cast<std::size_t>(x)] > sigma[static_cast<std::size_t>(y)];
  });

  const double smax = sigma[static_cast<std::size_t>(order[0])];
  out.u = Eigen::MatrixXd::Zero(m, n);
  out.v = Eigen::MatrixXd::Zero(n, n);
  out.singular_values.resize(static_cast<std::size_t>(n));
  std::vector<bool> filled(static_cast<std::size_t>(n), false);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    const double s = sigma[static_cast<std::size_t>(src)];
    out.singular_values[static_cast<std::size_t>(k)] = s;
    out.v.col(k) = v.col(src);
    if (s > 0.0 && s > 1e-15 * smax) {
      out.u.col(k) = a.col(src) / s;
      filled[static_cast<std::size_t>(k)] = true;
    }
  }
  // Complete null directions with canonical vectors orthogonalized against the rest.
  Eigen::Index candidate = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (filled[static_cast<std::size_t>(k)]) continue;
    while (candidate < m) {
      Eigen::VectorXd e = Eigen::VectorXd::Unit(m, candidate++);
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index c = 0; c < n; ++c) {
          if (c == k || (!filled[static_cast<std::size_t>(c)])) continue;
          e -= out.u.col(c).dot(e) * out.u.col(c);
        }
      }
      if (e.norm() > 0.5) {
        out.u.col(k) = e.normalized();
        filled[static_cast<std::size_t>(k)] = true;
        break;
      }
    }
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index arg = 0;
    out.u.col(k).cwiseAbs().maxCoeff(&arg);
    if (out.u(arg, k) < 0.0) {
      out.u.col(k) *= -1.0;
      out.v.col(k) *= -1.0;
    }
  }
  return out;
}

ModeBasis svd(const SnapshotMatrix& snapshots) {
  SvdResult r = jacobi_svd(snapshots.data);
  return ModeBasis{std::move(r.u), std::move(r.singular_values), snapshots.levels, snapshots.reference};
}

std::vector<double> barycentric_samples(const InterpWeights& weights, std::span<const QuantileCurve> curves,
                                        std::span<const double> levels) {
  require(weights.size() == curves.size(), ErrorCode::ShapeMismatch, "weight count differs from the curve count");
  std::vector<double> out(levels.size(), 0.0);
  for (std::size_t n = 0; n < curves.size(); ++n) {
    if (weights[n] == 0.0) continue;
    const std::vector<double> s = sample_quantile(curves[n], levels);
    for (std::size_t q = 0; q < out.size(); ++q) out[q] += weights[n] * s[q];
  }
  return out;
}

std::vector<double> isotonic_fit(std::span<const double> values) {
  struct Block {
    double sum;
    std::size_t count;
    double mean() const { return sum / static_cast<double>(count); }
  };
  std::vector<Block> blocks;
  for (double x : values) {
    blocks.push_back({x, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
      const Block top = blocks.back();
      blocks.pop_back();
      blocks.back().sum += top.sum;
      blocks.back().count += top.count;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const Block& b : blocks) out.insert(out.end(), b.count, b.mean());
  return out;
}

QuantileCurve reconstruct(const ModeBasis& basis, const InterpWeights& weights, std::span<const QuantileCurve> curves,
                          std::size_t rank) {
  const auto modes = static_cast<std::size_t>(basis.modes.cols());
  if (rank > modes) {
    fail(ErrorCode::RankTooLarge,
         "rank " + std::to_string(rank) + " exceeds the " + std::to_string(modes) + " available modes");
  }
  const std::vector<double>& levels = basis.levels;
  const std::vector<double> b = barycentric_samples(weights, curves, levels);
  const std::vector<double> ref = sample_quantile(basis.reference, levels);
  const auto q = static_cast<Eigen::Index>(levels.size());
  Eigen::VectorXd d(q);
  for (Eigen::Index i = 0; i < q; ++i) d(i) = b[static_cast<std::size_t>(i)] - ref[static_cast<std::size_t>(i)];
  const auto lead = basis.modes.leftCols(static_cast<Eigen::Index>(rank));
  const Eigen::VectorXd projected = lead * (lead.transpose() * d);

  std::vector<double> xs(levels.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = ref[i] + projected(static_cast<Eigen::Index>(i));
  xs = isotonic_fit(xs);

  std::vector<double> ys;
  std::vector<double> nodes;
  ys.reserve(levels.size() + 2);
  nodes.reserve(levels.size() + 2);
  const std::size_t last = levels.size() - 1;
  const double lead_slope = last > 0 ? (xs[1] - xs[0]) / (levels[1] - levels[0]) : 0.0;
  const double tail_slope = last > 0 ? (xs[last] - xs[last - 1]) / (levels[last] - levels[last - 1]) : 0.0;
  if (levels.front() > 0.0) {
    ys.push_back(0.0);
    nodes.push_back(xs[0] - lead_slope * levels[0]);
  }
  for (std::size_t i = 0; i <= last; ++i) {
    ys.push_back(levels[i]);
    nodes.push_back(xs[i]);
  }
  if (levels.back() < 1.0) {
    ys.push_back(1.0);
    nodes.push_back(xs[last] + tail_slope * (1.0 - levels[last]));
  }
  return QuantileCurve(std::move(ys), std::move(nodes));
}

SingularStats singular_stats(const std::vector<std::vector<double>>& per_angle) {
  require(!per_angle.empty(), ErrorCode::EmptyInput, "no singular-value vectors supplied");
  const std::size_t len = per_angle.front().size();
  for (const auto& s : per_angle) {
    require(s.size() == len, ErrorCode::ShapeMismatch, "singular-value vectors differ in length");
  }
  SingularStats out{std::vector<double>(len, 0.0), std::vector<double>(len, 0.0)};
  const double count = static_cast<double>(per_angle.size());
  for (const auto& s : per_angle) {
    for (std::size_t j = 0; j < len; ++j) out.means[j] += s[j];
  }
  for (double& m : out.means) m /= count;
  for (const auto& s : per_angle) {
    for (std::size_t j = 0; j < len; ++j) out.stds[j] += (s[j] - out.means[j]) * (s[j] - out.means[j]);
  }
  for (double& v : out.stds) v = std::sqrt(v / count);
  return out;
}

}  // namespace dinterp
