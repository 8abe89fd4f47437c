#pragma once

// One-dimensional representations used by every interpolation routine:
// cell grids, piecewise-constant densities, their piecewise-linear CDFs and
// the pseudo-inverse (quantile) curves of those CDFs. All conversions between
// them are closed-form; no quadrature or root finding is involved.

#include <cstddef>
#include <span>
#include <vector>

namespace dinterp {

// Coincident-node threshold in the quantile variable y.
inline constexpr double kCoincidentY = 1e-14;
// Cell values in [-kNegativeClip, 0) are roundoff and are clamped to zero.
inline constexpr double kNegativeClip = 1e-12;
// Relative scale below which a density is considered massless.
inline constexpr double kZeroMassRel = 1e-12;

class Grid1D {
 public:
  explicit Grid1D(std::vector<double> edges);

  // J cells of equal width on [a, b]; edge j is computed as a + (b - a) * j / J.
  static Grid1D uniform(double a, double b, std::size_t cells);

  std::size_t cells() const noexcept { return edges_.size() - 1; }
  std::span<const double> edges() const noexcept { return edges_; }
  double edge(std::size_t j) const { return edges_[j]; }
  double left() const noexcept { return edges_.front(); }
  double right() const noexcept { return edges_.back(); }
  double length() const noexcept { return right() - left(); }
  double width(std::size_t j) const { return edges_[j + 1] - edges_[j]; }
  double center(std::size_t j) const { return 0.5 * (edges_[j] + edges_[j + 1]); }
  bool is_uniform(double rtol = 1e-12) const;

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  std::vector<double> edges_;
};

// Piecewise-constant function: values[j] is the average over cell j.
class PwcFunction1D {
 public:
  PwcFunction1D(Grid1D grid, std::vector<double> values);

  static PwcFunction1D zeros(Grid1D grid);

  const Grid1D& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double value(std::size_t j) const { return values_[j]; }
  std::size_t cells() const noexcept { return grid_.cells(); }

  double mass() const;
  double max_abs() const;
  // Value at x (right-continuous; zero outside the grid).
  double evaluate(double x) const;

  friend bool operator==(const PwcFunction1D&, const PwcFunction1D&) = default;

 private:
  Grid1D grid_;
  std::vector<double> values_;
};

// Piecewise-linear CDF U(x) = total_mass * F(x). Nodes are stored as
// normalized fractions F in [0, 1] so that the reflection to and from a
// quantile curve is a pure coordinate swap. Coincident x-nodes with rising F
// describe an atom, which is representable here but not as a density.
class PwlCdf {
 public:
  PwlCdf(std::vector<double> xs, std::vector<double> fractions, double total_mass);

  std::size_t size() const noexcept { return xs_.size(); }
  std::span<const double> xs() const noexcept { return xs_; }
  std::span<const double> fractions() const noexcept { return fractions_; }
  double total_mass() const noexcept { return total_mass_; }
  double x(std::size_t j) const { return xs_[j]; }
  double fraction(std::size_t j) const { return fractions_[j]; }
  // Unnormalized cumulative mass at node j.
  double value(std::size_t j) const { return fractions_[j] * total_mass_; }
  // Unnormalized U(x); 0 left of the first node, total_mass right of the last.
  double evaluate(double x) const;

  friend bool operator==(const PwlCdf&, const PwlCdf&) = default;

 private:
  std::vector<double> xs_;
  std::vector<double> fractions_;
  double total_mass_;
};

// A flat run of a CDF seen from the quantile side: at level y the curve
// jumps from x_minus to x_plus.
struct Jump {
  double y;
  double x_minus;
  double x_plus;
  double length() const noexcept { return x_plus - x_minus; }
};

// Pseudo-inverse of a normalized CDF: monotone piecewise-linear curve
// y -> x on [0, 1]. Consecutive nodes sharing the same y encode a jump.
class QuantileCurve {
 public:
  QuantileCurve(std::vector<double> ys, std::vector<double> xs);

  static QuantileCurve identity(double a = 0.0, double b = 1.0);

  std::size_t size() const noexcept { return ys_.size(); }
  std::span<const double> ys() const noexcept { return ys_; }
  std::span<const double> xs() const noexcept { return xs_; }

  double left_limit(double y) const;
  double right_limit(double y) const;
  std::vector<Jump> jumps() const;
  // Lower and upper ends of the transported interval.
  double domain_left() const noexcept { return xs_.front(); }
  double domain_right() const noexcept { return xs_.back(); }

  friend bool operator==(const QuantileCurve&, const QuantileCurve&) = default;

 private:
  std::vector<double> ys_;
  std::vector<double> xs_;
};

PwlCdf cdf(const PwcFunction1D& u);
QuantileCurve pseudo_inverse(const PwlCdf& cdf);
QuantileCurve combine(std::span<const QuantileCurve> curves, std::span<const double> weights);
PwlCdf quantile_to_cdf(const QuantileCurve& curve, double mass);
PwcFunction1D density_from_cdf(const PwlCdf& cdf);
PwcFunction1D resample(const PwcFunction1D& u, const Grid1D& target);

// Sum a*u + b*v on the union of both grids (zero outside each operand's grid).
PwcFunction1D linear_combination(double a, const PwcFunction1D& u, double b, const PwcFunction1D& v);
PwcFunction1D scaled(const PwcFunction1D& u, double factor);

// Mass below which a function with the given cell data counts as vanishing.
double zero_mass_threshold(const PwcFunction1D& u);

}  // namespace dinterp
