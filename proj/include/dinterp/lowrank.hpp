#pragma once

// Snapshot matrices of sampled quantile curves, their singular value
// decomposition into transport modes, truncated reconstruction and
// singular-value statistics across projection angles.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dinterp/dinterp1d.hpp"
#include "dinterp/grid1d.hpp"

namespace dinterp {

// Q interior sample levels y_q = (q - 1/2) / Q, q = 1..Q.
std::vector<double> interior_levels(std::size_t count);

// Right limits of the curve at each level; levels must be sorted and lie in (0, 1).
std::vector<double> sample_quantile(const QuantileCurve& curve, std::span<const double> levels);

struct SnapshotMatrix {
  Eigen::MatrixXd data;               // Q x K, unit-norm columns
  std::vector<double> levels;         // Q sample levels
  QuantileCurve reference;            // the subtracted first curve
  std::vector<std::size_t> members;   // source index of each column
  std::vector<double> column_norms;   // norms before normalization
  std::vector<std::string> warnings;  // dropped columns
};

// Column k holds the normalized difference between curve members[k] and curve 0.
SnapshotMatrix build_snapshots(std::span<const QuantileCurve> curves, std::span<const double> levels);

struct SvdResult {
  Eigen::MatrixXd u;                    // rows x cols, orthonormal columns
  std::vector<double> singular_values;  // non-increasing
  Eigen::MatrixXd v;                    // cols x cols, orthogonal
  std::size_t sweeps = 0;
};

// Thin SVD of a matrix with rows >= cols by one-sided Jacobi rotations in
// cyclic order. Each left singular vector is signed so that its
// largest-magnitude entry is positive.
SvdResult jacobi_svd(const Eigen::MatrixXd& a, std::size_t max_sweeps = 60);

struct ModeBasis {
  Eigen::MatrixXd modes;  // Q x K orthonormal columns
  std::vector<double> singular_values;
  std::vector<double> levels;
  QuantileCurve reference;
};

ModeBasis svd(const SnapshotMatrix& snapshots);

// Barycentric combination of the sampled curves, projected onto the leading
// `rank` modes (least squares) and repaired to be non-decreasing. The curve
// has nodes at the sample levels and is extended linearly to y = 0 and y = 1.
QuantileCurve reconstruct(const ModeBasis& basis, const InterpWeights& weights, std::span<const QuantileCurve> curves,
                          std::size_t rank);

// Sample vector of the barycentric combination before truncation.
std::vector<double> barycentric_samples(const InterpWeights& weights, std::span<const QuantileCurve> curves,
                                        std::span<const double> levels);

// Least-squares non-decreasing fit with unit weights (pool adjacent violators).
std::vector<double> isotonic_fit(std::span<const double> values);

struct SingularStats {
  std::vector<double> means;
  std::vector<double> stds;  // population convention
};

SingularStats singular_stats(const std::vector<std::vector<double>>& per_angle);

}  // namespace dinterp
