#pragma once

// Independent oracles used by the unit tests.

#include <algorithm>
#include <cmath>
#include <vector>

#include "dinterp/grid1d.hpp"

namespace dinterp::test {

// Antiderivative of the unit-mass hat of half-width w centred at 0.
inline double hat_primitive(double x, double w) {
  if (x <= -w) return 0.0;
  if (x >= w) return 1.0;
  const double s = (x + w) / w;
  if (x <= 0.0) return 0.5 * s * s;
  const double r = (w - x) / w;
  return 1.0 - 0.5 * r * r;
}

inline PwcFunction1D hat_cells(double w, double t, const Grid1D& g) {
  std::vector<double> v(g.cells());
  for (std::size_t j = 0; j < g.cells(); ++j) {
    v[j] = (hat_primitive(g.edge(j + 1) - t, w) - hat_primitive(g.edge(j) - t, w)) / g.width(j);
  }
  return PwcFunction1D(g, std::move(v));
}

inline double l1_distance(const PwcFunction1D& a, const PwcFunction1D& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.cells(); ++j) s += std::abs(a.value(j) - b.value(j)) * a.grid().width(j);
  return s;
}

inline double linf_distance(const PwcFunction1D& a, const PwcFunction1D& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.cells(); ++j) s = std::max(s, std::abs(a.value(j) - b.value(j)));
  return s;
}

}  // namespace dinterp::test
