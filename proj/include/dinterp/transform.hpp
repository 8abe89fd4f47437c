#pragma once

// Interpolation conjugated by invertible transforms: a chain of stages maps a
// field to a bundle of components, the one-dimensional interpolation acts on
// the final axis of every component, and the chain is inverted.

#include <complex>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "dinterp/dinterp1d.hpp"
#include "dinterp/grid1d.hpp"
#include "dinterp/lowrank.hpp"
#include "dinterp/radon.hpp"

namespace dinterp {

using Field = std::variant<PwcFunction1D, Image2D, Sinogram>;

std::string field_kind(const Field& f);
// Number of rows along the interpolated (final) axis and their length.
std::size_t field_rows(const Field& f);
std::size_t field_row_length(const Field& f);
std::vector<double> field_values(const Field& f);
double field_norm(const Field& f);
// Difference of two fields on identical shapes.
Field field_subtract(const Field& a, const Field& b);

struct Component {
  std::string name;
  Field field;
};

class ComponentBundle {
 public:
  ComponentBundle() = default;
  explicit ComponentBundle(std::vector<Component> components);

  void add(std::string name, Field field);
  std::size_t size() const noexcept { return components_.size(); }
  const std::vector<Component>& components() const noexcept { return components_; }
  const Component& operator[](std::size_t i) const { return components_[i]; }
  const Field& at(const std::string& name) const;
  bool contains(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::vector<Component> components_;
};

enum class StageKind { SignSplit, Derivative, Radon, FourierPermute };

struct Stage {
  StageKind kind = StageKind::SignSplit;
  RadonGeometry geometry{};  // Radon stage
  double tol = 1e-8;         // Radon stage inversion
  std::size_t max_iter = 0;  // Radon stage inversion, 0 selects 10 D
};

std::string stage_name(StageKind kind);

class TransformChain {
 public:
  TransformChain() = default;
  explicit TransformChain(std::vector<Stage> stages) : stages_(std::move(stages)) {}

  TransformChain& sign_split();
  TransformChain& derivative();
  TransformChain& radon(RadonGeometry geometry = {}, double tol = 1e-8, std::size_t max_iter = 0);
  TransformChain& fourier_permute();

  const std::vector<Stage>& stages() const noexcept { return stages_; }
  bool empty() const noexcept { return stages_.empty(); }
  std::string describe() const;

 private:
  std::vector<Stage> stages_;
};

// Name of the single component of an untransformed field.
inline constexpr const char* kBaseComponent = "u";

ComponentBundle apply_chain(const TransformChain& chain, const Field& u);
Field invert_chain(const TransformChain& chain, const ComponentBundle& bundle);

// Names of the eight Fourier components in emission order. The two letters
// give the parity (odd/even, 0-based) of the row and column frequency index.
const std::vector<std::string>& fourier_component_names();

// Unitary 2D DFT split into real and imaginary parts on the four parity
// sub-lattices, each (D/2) x (D/2) on the image's extent.
ComponentBundle fourier_permute(const Image2D& u);

struct FourierInverse {
  Image2D image;
  double imaginary_residue = 0.0;  // relative imaginary part left after symmetrization
};
// Reassembles the spectrum, restores Hermitian symmetry and transforms back.
FourierInverse fourier_unpermute(const ComponentBundle& bundle, std::size_t dim, Extent extent,
                                 const std::string& prefix = "");

// Unitary forward / inverse 2D DFT of a D x D row-major array.
std::vector<std::complex<double>> dft2(const std::vector<std::complex<double>>& data, std::size_t dim, bool inverse);

// Componentwise one-dimensional interpolation along the final axis.
ComponentBundle interp_bundles(const ComponentBundle& b1, const ComponentBundle& b2, double lambda);

Field interp_via_transform(const TransformChain& chain, const Field& u1, const Field& u2, double lambda);

// Singular values of transport maps across a family of images, angle by angle.
// The chain must end in a Radon stage. At each angle the slices of every
// component and sign part are turned into quantile curves sampled at
// `levels` interior points; a block enters only if that part carries mass in
// every member. Stacked blocks form one snapshot matrix per angle.
struct TransportSvdStudy {
  std::vector<std::vector<double>> per_angle;  // singular values, angles with no usable block omitted
  std::vector<std::size_t> angles_used;
  std::vector<std::size_t> blocks_per_angle;
  SingularStats stats;
  // Singular values of the raw family (flattened, unit-norm columns).
  std::vector<double> raw_singular_values;
};

TransportSvdStudy transport_svd_study(const std::vector<Image2D>& family, const TransformChain& chain,
                                      std::size_t levels);

}  // namespace dinterp
