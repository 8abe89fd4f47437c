#pragma once

// Parallel-beam Radon transform of piecewise-constant images, its adjoint,
// least-squares inversion, and displacement interpolation carried out slice
// by slice in Radon space.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dinterp/grid1d.hpp"

namespace dinterp {

struct Extent {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  friend bool operator==(const Extent&, const Extent&) = default;
};

// D x D cell values, row-major with the row index running along y.
class Image2D {
 public:
  Image2D(std::size_t dim, Extent extent, std::vector<double> values);
  static Image2D zeros(std::size_t dim, Extent extent);

  std::size_t dim() const noexcept { return dim_; }
  const Extent& extent() const noexcept { return extent_; }
  double pixel() const noexcept { return (extent_.x1 - extent_.x0) / static_cast<double>(dim_); }
  double center_x(std::size_t ix) const { return extent_.x0 + (static_cast<double>(ix) + 0.5) * pixel(); }
  double center_y(std::size_t iy) const { return extent_.y0 + (static_cast<double>(iy) + 0.5) * pixel(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double at(std::size_t iy, std::size_t ix) const { return values_[iy * dim_ + ix]; }
  double& at(std::size_t iy, std::size_t ix) { return values_[iy * dim_ + ix]; }

  double mass() const;
  double norm() const;  // Euclidean norm of the cell values

  friend bool operator==(const Image2D&, const Image2D&) = default;

 private:
  std::size_t dim_;
  Extent extent_;
  std::vector<double> values_;
};

struct RadonGeometry {
  std::size_t angles = 0;   // 0 selects 4 D
  double oversample = 2.0;  // s-bins per pixel width
  friend bool operator==(const RadonGeometry&, const RadonGeometry&) = default;
};

// Bin averages of line integrals. Angle p is theta = pi p / P with direction
// (cos theta, sin theta); bin k is centred at s = c.omega + s_rel(k), where c is
// the image centre and s_rel runs symmetrically over the image diagonal.
class Sinogram {
 public:
  Sinogram(std::size_t dim, Extent extent, RadonGeometry geometry);

  std::size_t image_dim() const noexcept { return dim_; }
  const Extent& image_extent() const noexcept { return extent_; }
  const RadonGeometry& geometry() const noexcept { return geometry_; }
  std::size_t angles() const noexcept { return geometry_.angles; }
  std::size_t bins() const noexcept { return bins_; }
  double bin_width() const noexcept { return bin_width_; }

  double theta(std::size_t p) const;
  double omega_x(std::size_t p) const;
  double omega_y(std::size_t p) const;
  double s_relative(std::size_t k) const;
  double s_absolute(std::size_t p, std::size_t k) const;
  // Relative s-grid shared by every slice.
  Grid1D s_grid() const;

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double at(std::size_t p, std::size_t k) const { return values_[p * bins_ + k]; }
  double& at(std::size_t p, std::size_t k) { return values_[p * bins_ + k]; }

  PwcFunction1D slice(std::size_t p) const;
  void set_slice(std::size_t p, const PwcFunction1D& f);
  double slice_mass(std::size_t p) const;
  double norm() const;

  bool same_geometry(const Sinogram& other) const;
  friend bool operator==(const Sinogram&, const Sinogram&) = default;

 private:
  std::size_t dim_;
  Extent extent_;
  RadonGeometry geometry_;
  std::size_t bins_;
  double bin_width_;
  std::vector<double> values_;
};

RadonGeometry resolve_geometry(std::size_t dim, RadonGeometry geometry);

Sinogram radon_forward(const Image2D& u, RadonGeometry geometry = {});
Image2D radon_adjoint(const Sinogram& g, std::size_t dim);

struct InversionResult {
  Image2D image;
  std::size_t iterations = 0;
  double residual = 0.0;  // final relative normal-equation residual
  bool converged = false;
  std::vector<double> residual_history;  // relative normal-equation residual per iteration
  std::vector<double> data_residual;     // ||g - R u_k|| per iteration, starting at k = 0
};

// Least-squares CG on the normal equations. max_iter = 0 selects 10 D.
InversionResult radon_invert(const Sinogram& g, std::size_t dim, double tol = 1e-8, std::size_t max_iter = 0);

// Relative mismatch between the transform of a partial derivative and the
// omega-weighted s-derivative of the transform (axis 1 = x, 2 = y).
double intertwine_residual(const Image2D& u, int axis, RadonGeometry geometry = {});

struct Dinterp2dResult {
  Image2D image;
  InversionResult inversion;
  Sinogram sinogram;  // interpolated sinogram before inversion
};

Dinterp2dResult dinterp2d(const Image2D& u1, const Image2D& u2, double lambda, RadonGeometry geometry = {},
                          double tol = 1e-8, std::size_t max_iter = 0);

// Slice-wise interpolation of two sinograms on one geometry (the I_x step).
Sinogram interp_sinograms(const Sinogram& g1, const Sinogram& g2, double lambda);

}  // namespace dinterp
