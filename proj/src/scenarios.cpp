#include "dinterp/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "dinterp/error.hpp"

namespace dinterp {

double ScenarioSpec::get(const std::string& key) const {
  const auto it = parameters.find(key);
  if (it == parameters.end()) fail(ErrorCode::InvalidArgument, "scenario '" + name + "' lacks parameter '" + key + "'");
  return it->second;
}

double ScenarioSpec::get_or(const std::string& key, double fallback) const {
  const auto it = parameters.find(key);
  return it == parameters.end() ? fallback : it->second;
}

// ---------------------------------------------------------------- profiles

double PwlProfile::evaluate(double x) const {
  if (xs.empty() || x < xs.front() || x > xs.back()) return 0.0;
  // Right-continuous at jumps: take the last node at or left of x.
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin());
  if (i == xs.size()) return ys.back();
  const double x0 = xs[i - 1], x1 = xs[i];
  return ys[i - 1] + (ys[i] - ys[i - 1]) * (x - x0) / (x1 - x0);
}

PwcFunction1D sample(const PwlProfile& f, const Grid1D& grid, Sampling mode) {
  require(f.xs.size() == f.ys.size(), ErrorCode::ShapeMismatch, "profile node arrays differ in length");
  std::vector<double> out(grid.cells(), 0.0);
  if (mode == Sampling::CellCenter) {
    for (std::size_t j = 0; j < grid.cells(); ++j) out[j] = f.evaluate(grid.center(j));
    return PwcFunction1D(grid, std::move(out));
  }
  const auto edges = grid.edges();
  for (std::size_t i = 0; i + 1 < f.xs.size(); ++i) {
    const double a = f.xs[i], b = f.xs[i + 1];
    if (!(b > a)) continue;
    const double ya = f.ys[i], yb = f.ys[i + 1];
    auto value = [&](double x) { return ya + (yb - ya) * (x - a) / (b - a); };
    const auto first = std::upper_bound(edges.begin(), edges.end(), a);
    std::size_t j = first == edges.begin() ? 0 : static_cast<std::size_t>(first - edges.begin()) - 1;
    for (; j < grid.cells() && edges[j] < b; ++j) {
      const double lo = std::max(a, edges[j]);
      const double hi = std::min(b, edges[j + 1]);
      if (!(hi > lo)) continue;
      out[j] += 0.5 * (value(lo) + value(hi)) * (hi - lo) / grid.width(j);
    }
  }
  return PwcFunction1D(grid, std::move(out));
}

double hat_value(double x, double w, double t) {
  const double r = std::abs(x - t);
  return r >= w ? 0.0 : (w - r) / (w * w);
}

PwlProfile hat_profile(double w, double t, double scale) {
  require(std::isfinite(w) && w > 0.0, ErrorCode::InvalidArgument, "hat half-width must be positive");
  return {{t - w, t, t + w}, {0.0, scale / w, 0.0}};
}

PwcFunction1D hat(double w, double t, const Grid1D& grid, Sampling mode) {
  return sample(hat_profile(w, t), grid, mode);
}

std::vector<PwcFunction1D> transport_family(std::size_t n_max, double w, const Grid1D& grid) {
  require(n_max >= 1, ErrorCode::InvalidArgument, "family needs at least one member");
  std::vector<PwcFunction1D> out;
  const double len = grid.length();
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double shift = 3.0 * w * static_cast<double>(n - 1);
    double centre = 3.0 * w + shift;
    centre = grid.left() + std::fmod(centre - grid.left(), len);
    if (centre < grid.left()) centre += len;
    if (centre - w < grid.left() || centre + w > grid.right()) {
      fail(ErrorCode::OutOfDomain, "member " + std::to_string(n) + " would wrap across the domain boundary");
    }
    out.push_back(hat(w, centre, grid));
  }
  return out;
}

PwcFunction1D acoustics_pressure(double t, double w, double c, const Grid1D& grid, Sampling mode) {
  require(t >= 0.0, ErrorCode::InvalidArgument, "time must be nonnegative");
  const PwlProfile right = hat_profile(w, 2.0 * w + c * t, 0.5);
  const PwlProfile left = hat_profile(w, 2.0 * w - c * t, 0.5);
  for (const auto* p : {&right, &left}) {
    if (p->xs.front() < grid.left() || p->xs.back() > grid.right()) {
      fail(ErrorCode::OutOfDomain, "pressure pulse leaves the grid at t = " + std::to_string(t));
    }
  }
  const PwcFunction1D a = sample(right, grid, mode);
  const PwcFunction1D b = sample(left, grid, mode);
  std::vector<double> v(grid.cells());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = a.value(j) + b.value(j);
  return PwcFunction1D(grid, std::move(v));
}

Grid1D acoustics_grid() {
  constexpr double h = 0.005;
  constexpr int half = 700;
  std::vector<double> edges;
  edges.reserve(2 * half + 2);
  for (int k = -half; k <= half + 1; ++k) edges.push_back((static_cast<double>(k) - 0.5) * h);
  return Grid1D(std::move(edges));
}

// ---------------------------------------------------------------- Burgers

ScenarioSpec burgers_hat_ic(double amplitude, double center, double width) {
  return {"burgers-hat",
          {{"amplitude", amplitude}, {"center", center}, {"width", width}, {"domain_left", 0.0},
           {"domain_right", 2.0}, {"t1", 1.0}, {"t2", 3.0}},
          "stand-in: hat pulse amplitude * phi(x - center; width) on zero background, i.e. the "
          "unit-background pulse seen in the frame moving with speed 1"};
}

ScenarioSpec burgers_riemann_ic(double x0, double left_state, double right_state) {
  return {"burgers-riemann",
          {{"x0", x0}, {"left_state", left_state}, {"right_state", right_state}, {"domain_left", 0.0},
           {"domain_right", 2.0}},
          "Riemann problem"};
}

double burgers_shock_position(double t, const ScenarioSpec& ic) {
  require(ic.name == "burgers-hat", ErrorCode::UnsupportedIC, "shock position is tracked for the hat pulse only");
  const double a = ic.get("amplitude"), c = ic.get("center"), w = ic.get("width");
  const double k = a / (w * w);
  if (t < 1.0 / k) return std::numeric_limits<double>::quiet_NaN();
  return c - w + w * std::sqrt(2.0 * (1.0 + k * t));
}

PwlProfile burgers_profile(double t, const ScenarioSpec& ic, const Grid1D& grid) {
  require(std::isfinite(t) && t >= 0.0, ErrorCode::InvalidArgument, "time must be nonnegative");
  if (ic.name == "burgers-hat") {
    const double a = ic.get("amplitude"), c = ic.get("center"), w = ic.get("width");
    require(a > 0.0 && w > 0.0, ErrorCode::UnsupportedIC, "hat pulse needs positive amplitude and width");
    const double height = a / w;
    const double k = height / w;
    const double foot = c - w;
    PwlProfile p;
    if (k * t < 1.0) {
      const double peak = c + height * t;
      p = {{foot, peak, c + w}, {0.0, height, 0.0}};
    } else {
      const double xi = w * std::sqrt(2.0 * (1.0 + k * t));
      p = {{foot, foot + xi, foot + xi}, {0.0, k * xi / (1.0 + k * t), 0.0}};
    }
    if (p.xs.front() < grid.left() || p.xs.back() > grid.right()) {
      fail(ErrorCode::OutOfDomain, "pulse leaves the grid at t = " + std::to_string(t));
    }
    return p;
  }
  if (ic.name == "burgers-riemann") {
    const double x0 = ic.get("x0"), ul = ic.get("left_state"), ur = ic.get("right_state");
    const double lo = grid.left(), hi = grid.right();
    std::vector<double> xs, ys;
    auto push = [&](double x, double y) {
      xs.push_back(std::clamp(x, lo, hi));
      ys.push_back(y);
    };
    push(lo, ul);
    if (ul > ur) {
      const double s = x0 + 0.5 * (ul + ur) * t;
      push(s, ul);
      push(s, ur);
    } else {
      push(x0 + ul * t, ul);
      push(x0 + ur * t, ur);
    }
    push(hi, ur);
    return {std::move(xs), std::move(ys)};
  }
  fail(ErrorCode::UnsupportedIC, "unknown initial condition '" + ic.name + "'");
}

PwcFunction1D burgers_solution(double t, const ScenarioSpec& ic, const Grid1D& grid) {
  return sample(burgers_profile(t, ic, grid), grid, Sampling::CellAverage);
}

// ---------------------------------------------------------------- 2D fields

std::pair<Image2D, Image2D> diamond_gaussians(std::size_t dim) {
  const Extent ext{-1.5, 1.5, -1.5, 1.5};
  Image2D u1 = Image2D::zeros(dim, ext);
  Image2D u2 = Image2D::zeros(dim, ext);
  for (std::size_t iy = 0; iy < dim; ++iy) {
    for (std::size_t ix = 0; ix < dim; ++ix) {
      const double x = u1.center_x(ix), y = u1.center_y(iy);
      const double r = std::abs(x) + std::abs(y);
      u1.at(iy, ix) = 1.5 * std::exp(-(r - 0.75) * (r - 0.75) / (2 * 0.04) - (r - 0.5) * (r - 0.5) / (2 * 0.04));
      const double q = std::abs(x - 0.5) + std::abs(y - 0.25);
      u2.at(iy, ix) = 1.5 * std::exp(-q * q / (2 * 0.0025));
    }
  }
  return {std::move(u1), std::move(u2)};
}

Image2D oscillatory(double k, double sigma2, std::size_t dim) {
  require(k > 0.0 && sigma2 > 0.0, ErrorCode::InvalidArgument, "wavenumber and variance must be positive");
  require(dim % 2 == 0, ErrorCode::OddDimension, "oscillatory field needs an even dimension");
  Image2D u = Image2D::zeros(dim, Extent{0.0, 1.0, 0.0, 1.0});
  for (std::size_t iy = 0; iy < dim; ++iy) {
    for (std::size_t ix = 0; ix < dim; ++ix) {
      const double x = u.center_x(ix), y = u.center_y(iy);
      const double r2 = x * x + y * y;
      u.at(iy, ix) = std::exp(-r2 / (2.0 * sigma2)) * std::cos(k * std::numbers::pi * std::sqrt(r2));
    }
  }
  return u;
}

// ---------------------------------------------------------------- random hats

std::vector<HatDraw> random_hat_draws(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  auto uniform = [&] { return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53; };
  std::vector<HatDraw> out(n);
  for (auto& d : out) {
    d.t = 0.1 + 0.8 * uniform();
    d.w = 0.1 * uniform();
  }
  return out;
}

std::vector<PwcFunction1D> random_hats(std::size_t n, std::uint64_t seed, const Grid1D& grid) {
  require(n >= 2, ErrorCode::InvalidArgument, "random family needs at least two members");
  std::vector<PwcFunction1D> out;
  for (const auto& d : random_hat_draws(n, seed)) out.push_back(hat(d.w, d.t, grid));
  return out;
}

// ---------------------------------------------------------------- two-parameter triple

std::array<PwcFunction1D, 3> two_param_triple(const Grid1D& grid) {
  const PwcFunction1D a = sample(hat_profile(0.05, 0.25, 0.6), grid);
  const PwcFunction1D b = sample(hat_profile(0.03, 0.45, 0.4), grid);
  std::vector<double> first(grid.cells());
  for (std::size_t j = 0; j < first.size(); ++j) first[j] = a.value(j) + b.value(j);

  const PwlProfile box2{{0.55, 0.65}, {10.0, 10.0}};
  const PwcFunction1D u2 = sample(box2, grid);
  const PwcFunction1D left = sample(PwlProfile{{0.2, 0.26}, {5.0, 5.0}}, grid);
  const PwcFunction1D right = sample(PwlProfile{{0.7, 0.74}, {17.5, 17.5}}, grid);
  std::vector<double> third(grid.cells());
  for (std::size_t j = 0; j < third.size(); ++j) third[j] = left.value(j) + right.value(j);
  return {PwcFunction1D(grid, std::move(first)), u2, PwcFunction1D(grid, std::move(third))};
}

std::vector<std::vector<double>> two_param_nodes() { return {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}; }

std::vector<std::vector<double>> two_param_queries() {
  return {{0.25, 0.0},  {0.5, 0.0},  {0.75, 0.0},  {0.75, 0.25}, {0.5, 0.5},   {0.25, 0.75},
          {0.0, 0.75},  {0.0, 0.5},  {0.0, 0.25},  {0.25, 0.25}, {0.5, 0.25},  {0.25, 0.5}};
}

// ---------------------------------------------------------------- wavelets

double mexican_hat(double x) { return (1.0 - x * x) * std::exp(-0.5 * x * x); }

namespace {
double mexican_hat_primitive(double x) { return x * std::exp(-0.5 * x * x); }
}  // namespace

Grid1D wavelet_grid() { return Grid1D::uniform(-16.0, 16.0, 6400); }

PwcFunction1D wavelet_atom(double a, double b, const Grid1D& grid) {
  require(a != 0.0 && std::isfinite(a) && std::isfinite(b), ErrorCode::InvalidArgument, "dilation must be nonzero");
  const double scale = a / std::sqrt(std::abs(a));
  std::vector<double> v(grid.cells());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double lo = mexican_hat_primitive((grid.edge(j) - b) / a);
    const double hi = mexican_hat_primitive((grid.edge(j + 1) - b) / a);
    v[j] = scale * (hi - lo) / grid.width(j);
  }
  return PwcFunction1D(grid, std::move(v));
}

std::array<PwcFunction1D, 3> wavelet_triple(const Grid1D& grid) {
  return {wavelet_atom(1.0, 0.0, grid), wavelet_atom(2.0, 0.0, grid), wavelet_atom(1.0, 1.0, grid)};
}

}  // namespace dinterp
