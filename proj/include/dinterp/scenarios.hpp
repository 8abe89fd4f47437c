#pragma once

// Closed-form inputs and reference solutions for the standard experiments.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dinterp/grid1d.hpp"
#include "dinterp/radon.hpp"

namespace dinterp {

struct ScenarioSpec {
  std::string name;
  std::map<std::string, double> parameters;
  std::string description;

  double get(const std::string& key) const;
  double get_or(const std::string& key, double fallback) const;
};

enum class Sampling { CellAverage, CellCenter };

// Continuous piecewise-linear profile given by nodes (x_i, y_i), zero outside
// [x_0, x_last]; repeated abscissae encode jumps.
struct PwlProfile {
  std::vector<double> xs;
  std::vector<double> ys;
  double evaluate(double x) const;
};

PwcFunction1D sample(const PwlProfile& f, const Grid1D& grid, Sampling mode = Sampling::CellAverage);

// Unit-mass hat of half-width w centred at t.
double hat_value(double x, double w, double t);
PwlProfile hat_profile(double w, double t, double scale = 1.0);
PwcFunction1D hat(double w, double t, const Grid1D& grid, Sampling mode = Sampling::CellAverage);

// Members n = 1..n_max of the advected hat: centre 3w + 3w(n - 1) on the grid's
// periodic domain.
std::vector<PwcFunction1D> transport_family(std::size_t n_max, double w, const Grid1D& grid);

PwcFunction1D acoustics_pressure(double t, double w, double c, const Grid1D& grid,
                                 Sampling mode = Sampling::CellAverage);
// Grid whose cell centres are the multiples of 0.005 in [-3.5, 3.5].
Grid1D acoustics_grid();

ScenarioSpec burgers_hat_ic(double amplitude = 0.2, double center = 0.3, double width = 0.1);
ScenarioSpec burgers_riemann_ic(double x0, double left_state, double right_state);
PwlProfile burgers_profile(double t, const ScenarioSpec& ic, const Grid1D& grid);
PwcFunction1D burgers_solution(double t, const ScenarioSpec& ic, const Grid1D& grid);
// Shock position of the hat initial condition at time t (NaN before breaking).
double burgers_shock_position(double t, const ScenarioSpec& ic);

std::pair<Image2D, Image2D> diamond_gaussians(std::size_t dim = 128);
Image2D oscillatory(double k, double sigma2, std::size_t dim);

struct HatDraw {
  double t;
  double w;
};
// Uniform draws in (0, 1) are ((x >> 11) + 0.5) * 2^-53 for successive outputs
// x of std::mt19937_64 seeded with `seed`; each member consumes two draws,
// t = 0.1 + 0.8 u then w = 0.1 u'.
std::vector<HatDraw> random_hat_draws(std::size_t n, std::uint64_t seed);
std::vector<PwcFunction1D> random_hats(std::size_t n, std::uint64_t seed, const Grid1D& grid);

std::array<PwcFunction1D, 3> two_param_triple(const Grid1D& grid);
// Parameter nodes of the triple and the twelve evaluation points.
std::vector<std::vector<double>> two_param_nodes();
std::vector<std::vector<double>> two_param_queries();

double mexican_hat(double x);
Grid1D wavelet_grid();
std::array<PwcFunction1D, 3> wavelet_triple(const Grid1D& grid);
// Cell averages of |a|^{-1/2} psi((x - b) / a).
PwcFunction1D wavelet_atom(double a, double b, const Grid1D& grid);

}  // namespace dinterp
