#include "dinterp/radon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dinterp/dinterp1d.hpp"
#include "dinterp/error.hpp"
#include "dinterp/parallel.hpp"

namespace dinterp {

// ---------------------------------------------------------------- Image2D

Image2D::Image2D(std::size_t dim, Extent extent, std::vector<double> values)
    : dim_(dim), extent_(extent), values_(std::move(values)) {
  require(dim_ >= 2, ErrorCode::ShapeMismatch, "image dimension must be at least 2");
  require(values_.size() == dim_ * dim_, ErrorCode::ShapeMismatch,
          "expected " + std::to_string(dim_ * dim_) + " image values, got " + std::to_string(values_.size()));
  const double wx = extent_.x1 - extent_.x0, wy = extent_.y1 - extent_.y0;
  require(std::isfinite(wx) && std::isfinite(wy) && wx > 0.0 && wy > 0.0, ErrorCode::InvalidArgument,
          "image extent must be a nondegenerate rectangle");
  require(std::abs(wx - wy) <= 1e-12 * wx, ErrorCode::InvalidArgument, "image pixels must be square");
  for (double v : values_) require(std::isfinite(v), ErrorCode::InvalidArgument, "image values must be finite");
}

Image2D Image2D::zeros(std::size_t dim, Extent extent) {
  return Image2D(dim, extent, std::vector<double>(dim * dim, 0.0));
}

double Image2D::mass() const {
  double m = 0.0;
  for (double v : values_) m += v;
  return m * pixel() * pixel();
}

double Image2D::norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

// ---------------------------------------------------------------- Sinogram

RadonGeometry resolve_geometry(std::size_t dim, RadonGeometry geometry) {
  if (geometry.angles == 0) geometry.angles = 4 * dim;
  require(std::isfinite(geometry.oversample) && geometry.oversample >= 1.0, ErrorCode::InvalidArgument,
          "oversampling factor must be at least 1");
  return geometry;
}

Sinogram::Sinogram(std::size_t dim, Extent extent, RadonGeometry geometry)
    : dim_(dim), extent_(extent), geometry_(resolve_geometry(dim, geometry)) {
  require(dim_ >= 2, ErrorCode::ShapeMismatch, "image dimension must be at least 2");
  const double h = (extent_.x1 - extent_.x0) / static_cast<double>(dim_);
  bin_width_ = h / geometry_.oversample;
  const double diagonal = std::sqrt(2.0) * h * static_cast<double>(dim_);
  // One spare bin on either side absorbs rounding at the corners.
  bins_ = static_cast<std::size_t>(std::ceil(diagonal / bin_width_ - 1e-9)) + 2;
  values_.assign(geometry_.angles * bins_, 0.0);
}

double Sinogram::theta(std::size_t p) const {
  return std::numbers::pi * static_cast<double>(p) / static_cast<double>(geometry_.angles);
}
double Sinogram::omega_x(std::size_t p) const { return std::cos(theta(p)); }
double Sinogram::omega_y(std::size_t p) const { return std::sin(theta(p)); }

double Sinogram::s_relative(std::size_t k) const {
  return (static_cast<double>(k) + 0.5 - 0.5 * static_cast<double>(bins_)) * bin_width_;
}

double Sinogram::s_absolute(std::size_t p, std::size_t k) const {
  const double cx = 0.5 * (extent_.x0 + extent_.x1), cy = 0.5 * (extent_.y0 + extent_.y1);
  return cx * omega_x(p) + cy * omega_y(p) + s_relative(k);
}

Grid1D Sinogram::s_grid() const {
  std::vector<double> edges(bins_ + 1);
  for (std::size_t k = 0; k <= bins_; ++k) {
    edges[k] = (static_cast<double>(k) - 0.5 * static_cast<double>(bins_)) * bin_width_;
  }
  return Grid1D(std::move(edges));
}

PwcFunction1D Sinogram::slice(std::size_t p) const {
  require(p < angles(), ErrorCode::OutOfRange, "angle index out of range");
  return PwcFunction1D(s_grid(), std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(p * bins_),
                                                     values_.begin() + static_cast<std::ptrdiff_t>((p + 1) * bins_)));
}

void Sinogram::set_slice(std::size_t p, const PwcFunction1D& f) {
  require(p < angles(), ErrorCode::OutOfRange, "angle index out of range");
  require(f.cells() == bins_, ErrorCode::GeometryMismatch, "slice length differs from the number of s-bins");
  std::copy(f.values().begin(), f.values().end(), values_.begin() + static_cast<std::ptrdiff_t>(p * bins_));
}

double Sinogram::slice_mass(std::size_t p) const {
  double m = 0.0;
  for (std::size_t k = 0; k < bins_; ++k) m += at(p, k);
  return m * bin_width_;
}

double Sinogram::norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

bool Sinogram::same_geometry(const Sinogram& other) const {
  return dim_ == other.dim_ && extent_ == other.extent_ && geometry_ == other.geometry_;
}

// ---------------------------------------------------------------- projector

namespace {

// Footprint of one square pixel on the s-axis for a fixed direction: the
// fraction of pixel area lying below offset t from the pixel centre.
struct Footprint {
  double a, b, half_outer, half_inner;
  bool box;

  explicit Footprint(double h, double theta) {
    a = h * std::abs(std::cos(theta));
    b = h * std::abs(std::sin(theta));
    if (a < b) std::swap(a, b);
    half_outer = 0.5 * (a + b);
    half_inner = 0.5 * (a - b);
    box = b < 1e-14 * a;
  }

  double cumulative(double t) const {
    if (t <= -half_outer) return 0.0;
    if (t >= half_outer) return 1.0;
    if (box) return (t + 0.5 * a) / a;
    if (t <= -half_inner) {
      const double r = t + half_outer;
      return r * r / (2.0 * a * b);
    }
    if (t <= half_inner) return b / (2.0 * a) + (t + half_inner) / a;
    const double r = half_outer - t;
    return 1.0 - r * r / (2.0 * a * b);
  }
};

struct AngleData {
  double cos_t, sin_t;
  Footprint footprint;
};

class Projector {
 public:
  explicit Projector(const Sinogram& geometry)
      : dim_(geometry.image_dim()),
        bins_(geometry.bins()),
        h_((geometry.image_extent().x1 - geometry.image_extent().x0) / static_cast<double>(dim_)),
        ds_(geometry.bin_width()),
        s0_(-0.5 * static_cast<double>(bins_) * ds_) {
    angles_.reserve(geometry.angles());
    for (std::size_t p = 0; p < geometry.angles(); ++p) {
      const double th = geometry.theta(p);
      angles_.push_back({std::cos(th), std::sin(th), Footprint(h_, th)});
    }
  }

  // Calls fn(k, weight) for every bin touched by pixel (iy, ix) at angle p.
  template <class Fn>
  void visit(std::size_t p, std::size_t iy, std::size_t ix, Fn&& fn) const {
    const AngleData& ad = angles_[p];
    const double half = 0.5 * static_cast<double>(dim_);
    const double px = (static_cast<double>(ix) + 0.5 - half) * h_;
    const double py = (static_cast<double>(iy) + 0.5 - half) * h_;
    const double t0 = ad.cos_t * px + ad.sin_t * py;
    const double reach = ad.footprint.half_outer;
    const auto last = static_cast<std::ptrdiff_t>(bins_) - 1;
    const std::ptrdiff_t k_lo = std::clamp<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(std::floor((t0 - reach - s0_) / ds_)), 0, last);
    const std::ptrdiff_t k_hi = std::clamp<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(std::floor((t0 + reach - s0_) / ds_)), 0, last);
    const double scale = h_ * h_ / ds_;
    double below = ad.footprint.cumulative(edge(k_lo) - t0);
    for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k) {
      const double above = ad.footprint.cumulative(edge(k + 1) - t0);
      const double w = (above - below) * scale;
      if (w != 0.0) fn(static_cast<std::size_t>(k), w);
      below = above;
    }
  }

  std::size_t angles() const noexcept { return angles_.size(); }

 private:
  double edge(std::ptrdiff_t k) const { return s0_ + static_cast<double>(k) * ds_; }

  std::size_t dim_, bins_;
  double h_, ds_, s0_;
  std::vector<AngleData> angles_;
};

void forward_into(const Projector& proj, const Image2D& u, Sinogram& g) {
  const std::size_t dim = u.dim();
  const std::size_t bins = g.bins();
  auto values = g.values();
  std::fill(values.begin(), values.end(), 0.0);
  parallel_for(proj.angles(), [&](std::size_t p) {
    double* row = values.data() + p * bins;
    for (std::size_t iy = 0; iy < dim; ++iy) {
      for (std::size_t ix = 0; ix < dim; ++ix) {
        const double v = u.at(iy, ix);
        if (v == 0.0) continue;
        proj.visit(p, iy, ix, [&](std::size_t k, double w) { row[k] += w * v; });
      }
    }
  });
}

void adjoint_into(const Projector& proj, const Sinogram& g, Image2D& u) {
  const std::size_t dim = u.dim();
  auto out = u.values();
  parallel_for(dim * dim, [&](std::size_t idx) {
    const std::size_t iy = idx / dim, ix = idx % dim;
    double acc = 0.0;
    for (std::size_t p = 0; p < proj.angles(); ++p) {
      proj.visit(p, iy, ix, [&](std::size_t k, double w) { acc += w * g.at(p, k); });
    }
    out[idx] = acc;
  });
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

Sinogram radon_forward(const Image2D& u, RadonGeometry geometry) {
  Sinogram g(u.dim(), u.extent(), geometry);
  forward_into(Projector(g), u, g);
  return g;
}

Image2D radon_adjoint(const Sinogram& g, std::size_t dim) {
  require(dim == g.image_dim(), ErrorCode::GeometryMismatch,
          "sinogram was built for D = " + std::to_string(g.image_dim()) + ", not " + std::to_string(dim));
  Image2D u = Image2D::zeros(dim, g.image_extent());
  adjoint_into(Projector(g), g, u);
  return u;
}

InversionResult radon_invert(const Sinogram& g, std::size_t dim, double tol, std::size_t max_iter) {
  require(dim == g.image_dim(), ErrorCode::GeometryMismatch,
          "sinogram was built for D = " + std::to_string(g.image_dim()) + ", not " + std::to_string(dim));
  require(std::isfinite(tol) && tol > 0.0, ErrorCode::InvalidArgument, "tolerance must be positive");
  if (max_iter == 0) max_iter = 10 * dim;
  const Projector proj(g);
  const Extent ext = g.image_extent();

  InversionResult result{Image2D::zeros(dim, ext), 0, 0.0, false, {}, {}};
  Image2D& x = result.image;

  Sinogram r = g;
  Image2D s = Image2D::zeros(dim, ext);
  adjoint_into(proj, r, s);
  const double norm0 = s.norm();
  result.data_residual.push_back(r.norm());
  if (norm0 == 0.0) {
    result.converged = true;
    return result;
  }

  Image2D dir = s;
  Sinogram q(g.image_dim(), ext, g.geometry());
  double gamma = norm0 * norm0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    forward_into(proj, dir, q);
    const double qq = dot(q.values(), q.values());
    if (qq == 0.0) break;
    const double alpha = gamma / qq;
    {
      auto xv = x.values();
      const auto dv = dir.values();
      for (std::size_t i = 0; i < xv.size(); ++i) xv[i] += alpha * dv[i];
      auto rv = r.values();
      const auto qv = q.values();
      for (std::size_t i = 0; i < rv.size(); ++i) rv[i] -= alpha * qv[i];
    }
    adjoint_into(proj, r, s);
    const double gamma_next = dot(s.values(), s.values());
    result.iterations = it;
    result.residual = std::sqrt(gamma_next) / norm0;
    result.residual_history.push_back(result.residual);
    result.data_residual.push_back(r.norm());
    if (result.residual <= tol) {
      result.converged = true;
      break;
    }
    const double beta = gamma_next / gamma;
    gamma = gamma_next;
    auto dv = dir.values();
    const auto sv = s.values();
    for (std::size_t i = 0; i < dv.size(); ++i) dv[i] = sv[i] + beta * dv[i];
  }
  return result;
}

double intertwine_residual(const Image2D& u, int axis, RadonGeometry geometry) {
  require(axis == 1 || axis == 2, ErrorCode::InvalidArgument, "axis must be 1 (x) or 2 (y)");
  const std::size_t dim = u.dim();
  const double h = u.pixel();
  Image2D du = Image2D::zeros(dim, u.extent());
  bool any = false;
  for (std::size_t iy = 0; iy < dim; ++iy) {
    for (std::size_t ix = 0; ix < dim; ++ix) {
      double lo, hi;
      if (axis == 1) {
        lo = u.at(iy, ix == 0 ? 0 : ix - 1);
        hi = u.at(iy, std::min(ix + 1, dim - 1));
      } else {
        lo = u.at(iy == 0 ? 0 : iy - 1, ix);
        hi = u.at(std::min(iy + 1, dim - 1), ix);
      }
      du.at(iy, ix) = (hi - lo) / (2.0 * h);
      any = any || du.at(iy, ix) != 0.0;
    }
  }
  if (!any) return 0.0;

  const Sinogram lhs = radon_forward(du, geometry);
  const Sinogram g = radon_forward(u, geometry);
  const std::size_t bins = g.bins();
  double diff = 0.0, ref = 0.0;
  for (std::size_t p = 0; p < g.angles(); ++p) {
    const double w = axis == 1 ? g.omega_x(p) : g.omega_y(p);
    for (std::size_t k = 0; k < bins; ++k) {
      const double lo = g.at(p, k == 0 ? 0 : k - 1);
      const double hi = g.at(p, std::min(k + 1, bins - 1));
      const double rhs = w * (hi - lo) / (2.0 * g.bin_width());
      diff += (lhs.at(p, k) - rhs) * (lhs.at(p, k) - rhs);
      ref += rhs * rhs;
    }
  }
  return std::sqrt(diff / ref);
}

Sinogram interp_sinograms(const Sinogram& g1, const Sinogram& g2, double lambda) {
  require(g1.same_geometry(g2), ErrorCode::GeometryMismatch, "sinograms were built on different geometries");
  Sinogram out(g1.image_dim(), g1.image_extent(), g1.geometry());
  const Grid1D grid = g1.s_grid();
  // Slices below this fraction of the larger sinogram peak are roundoff and count as empty.
  double peak = 0.0;
  for (double x : g1.values()) peak = std::max(peak, std::abs(x));
  for (double x : g2.values()) peak = std::max(peak, std::abs(x));
  const double empty = 1e-13 * peak;
  parallel_for(g1.angles(), [&](std::size_t p) {
    const PwcFunction1D a = g1.slice(p), b = g2.slice(p);
    const bool za = a.max_abs() <= empty, zb = b.max_abs() <= empty;
    if (za && zb) return;
    try {
      if (za || zb) {
        fail(ErrorCode::BothPartsZero, std::string(za ? "first" : "second") + " sinogram slice is identically zero");
      }
      out.set_slice(p, resample(interp_signed(a, b, lambda), grid));
    } catch (const Error& e) {
      throw Error(e.code(), "angle " + std::to_string(p) + " (theta = " + std::to_string(g1.theta(p)) +
                                "): " + e.detail());
    }
  });
  return out;
}

Dinterp2dResult dinterp2d(const Image2D& u1, const Image2D& u2, double lambda, RadonGeometry geometry, double tol,
                          std::size_t max_iter) {
  require(u1.dim() == u2.dim() && u1.extent() == u2.extent(), ErrorCode::GeometryMismatch,
          "operands must share dimension and extent");
  require(std::isfinite(lambda) && lambda >= 0.0 && lambda <= 1.0, ErrorCode::InvalidArgument,
          "interpolation parameter must lie in [0, 1]");
  const Sinogram g1 = radon_forward(u1, geometry);
  const Sinogram g2 = radon_forward(u2, geometry);
  Sinogram mid = interp_sinograms(g1, g2, lambda);
  InversionResult inv = radon_invert(mid, u1.dim(), tol, max_iter);
  Image2D image = inv.image;
  return {std::move(image), std::move(inv), std::move(mid)};
}

}  // namespace dinterp
