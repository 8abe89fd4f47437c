#pragma once

// Displacement interpolation of one-dimensional densities: nonnegative
// pairs, signed pairs, barycentric families and the second-derivative
// splitting used for wave-like signals.

#include <cstddef>
#include <span>
#include <vector>

#include "dinterp/grid1d.hpp"

namespace dinterp {

struct SignedParts {
  PwcFunction1D plus;
  PwcFunction1D minus;  // stored nonnegative
  double mass_plus = 0.0;
  double mass_minus = 0.0;
};

SignedParts split_signs(const PwcFunction1D& u);

// True when the part carries no mass relative to the scale of the whole function.
bool vanishes(const PwcFunction1D& part, const PwcFunction1D& whole);

// Convex weights over N members, validated on construction.
class InterpWeights {
 public:
  explicit InterpWeights(std::vector<double> lambdas);
  static InterpWeights pair(double lambda);
  static InterpWeights vertex(std::size_t k, std::size_t n);

  std::span<const double> lambdas() const noexcept { return lambdas_; }
  std::size_t size() const noexcept { return lambdas_.size(); }
  double operator[](std::size_t i) const { return lambdas_[i]; }

 private:
  std::vector<double> lambdas_;
};

// Barycentric coordinates of `alpha` in the first (lexicographically ordered)
// simplex of the tessellation that contains it.
InterpWeights barycentric_weights(std::span<const double> alpha, const std::vector<std::vector<double>>& nodes,
                                  const std::vector<std::vector<std::size_t>>& simplices);

PwcFunction1D interp_nonneg(const PwcFunction1D& u1, const PwcFunction1D& u2, double lambda);

// Scale applied to the opposite-sign pairing when the second operand's
// negative part vanishes; mirrored cases permute the arguments.
double beta_coefficient(double m1_plus, double m1_minus, double m2_plus, double m2_minus, double lambda);

PwcFunction1D interp_signed(const PwcFunction1D& u1, const PwcFunction1D& u2, double lambda);

PwcFunction1D interp_bary(std::span<const PwcFunction1D> us, const InterpWeights& weights);

// Interpolates the four sign components of the second difference and
// integrates back twice. Both operands must share one grid.
PwcFunction1D interp_derivative_split(const PwcFunction1D& p1, const PwcFunction1D& p2, double lambda);

// Cellwise difference operator used by the derivative split, and its inverse.
std::vector<double> difference(std::span<const double> values, const Grid1D& grid);
std::vector<double> cumulative(std::span<const double> rates, const Grid1D& grid);

// Transport map x -> Q2(F1(x)+) (right limit of the target quantile) of a
// nonnegative pair, evaluated at the edges of u1's grid.
std::vector<double> transport_map(const PwcFunction1D& u1, const PwcFunction1D& u2);

}  // namespace dinterp
