#include "dinterp/transform.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <fftw3.h>

#include "dinterp/error.hpp"
#include "dinterp/parallel.hpp"

namespace dinterp {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

Grid1D row_grid(const Field& f) {
  return std::visit(Overloaded{[](const PwcFunction1D& u) { return u.grid(); },
                               [](const Image2D& u) {
                                 return Grid1D::uniform(u.extent().x0, u.extent().x1, u.dim());
                               },
                               [](const Sinogram& g) { return g.s_grid(); }},
                    f);
}

std::span<double> mutable_values(Field& f) {
  return std::visit(Overloaded{[](PwcFunction1D&) -> std::span<double> {
                                 fail(ErrorCode::InvariantViolation, "1D fields are rebuilt, not edited in place");
                               },
                               [](Image2D& u) { return u.values(); }, [](Sinogram& g) { return g.values(); }},
                    f);
}

// Applies fn to every row (final axis) and returns a field of the same shape.
template <class Fn>
Field map_rows(const Field& f, Fn fn) {
  const Grid1D grid = row_grid(f);
  if (const auto* u = std::get_if<PwcFunction1D>(&f)) {
    return PwcFunction1D(u->grid(), fn(u->values(), grid));
  }
  Field out = f;
  const std::size_t rows = field_rows(f), len = field_row_length(f);
  const std::vector<double> src = field_values(f);
  std::span<double> dst = mutable_values(out);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::vector<double> row = fn(std::span<const double>(src.data() + r * len, len), grid);
    std::copy(row.begin(), row.end(), dst.begin() + static_cast<std::ptrdiff_t>(r * len));
  }
  return out;
}

template <class Fn>
Field map_values(const Field& f, Fn fn) {
  if (const auto* u = std::get_if<PwcFunction1D>(&f)) {
    std::vector<double> v(u->values().begin(), u->values().end());
    for (double& x : v) x = fn(x);
    return PwcFunction1D(u->grid(), std::move(v));
  }
  Field out = f;
  for (double& x : mutable_values(out)) x = fn(x);
  return out;
}

bool same_shape(const Field& a, const Field& b) {
  if (a.index() != b.index()) return false;
  return std::visit(Overloaded{[&](const PwcFunction1D& u) { return u.grid() == std::get<PwcFunction1D>(b).grid(); },
                               [&](const Image2D& u) {
                                 const auto& v = std::get<Image2D>(b);
                                 return u.dim() == v.dim() && u.extent() == v.extent();
                               },
                               [&](const Sinogram& g) { return g.same_geometry(std::get<Sinogram>(b)); }},
                    a);
}

Field combine_parts(const Field& plus, const Field& minus) {
  if (const auto* p = std::get_if<PwcFunction1D>(&plus)) {
    const auto* m = std::get_if<PwcFunction1D>(&minus);
    require(m != nullptr, ErrorCode::ShapeMismatch, "sign parts have different kinds");
    if (p->grid() == m->grid()) {
      std::vector<double> v(p->cells());
      for (std::size_t j = 0; j < v.size(); ++j) v[j] = p->value(j) - m->value(j);
      return PwcFunction1D(p->grid(), std::move(v));
    }
    return linear_combination(1.0, *p, -1.0, *m);
  }
  require(same_shape(plus, minus), ErrorCode::ShapeMismatch, "sign parts have different shapes");
  Field out = plus;
  const std::vector<double> m = field_values(minus);
  std::span<double> v = mutable_values(out);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= m[i];
  return out;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

ComponentBundle apply_stage(const Stage& stage, const ComponentBundle& in) {
  ComponentBundle out;
  for (const Component& c : in.components()) {
    switch (stage.kind) {
      case StageKind::SignSplit:
        out.add(c.name + "+", map_values(c.field, [](double x) { return std::max(x, 0.0); }));
        out.add(c.name + "-", map_values(c.field, [](double x) { return std::max(-x, 0.0); }));
        break;
      case StageKind::Derivative:
        out.add(c.name + "'", map_rows(c.field, [](std::span<const double> row, const Grid1D& g) {
                  return difference(row, g);
                }));
        break;
      case StageKind::Radon: {
        const auto* img = std::get_if<Image2D>(&c.field);
        if (img == nullptr) {
          fail(ErrorCode::ShapeMismatch, "Radon stage needs an image, component '" + c.name + "' is a " +
                                             field_kind(c.field));
        }
        out.add(c.name, radon_forward(*img, stage.geometry));
        break;
      }
      case StageKind::FourierPermute: {
        const auto* img = std::get_if<Image2D>(&c.field);
        if (img == nullptr) {
          fail(ErrorCode::ShapeMismatch, "Fourier stage needs an image, component '" + c.name + "' is a " +
                                             field_kind(c.field));
        }
        const ComponentBundle parts = fourier_permute(*img);
        for (const Component& p : parts.components()) out.add(c.name + "." + p.name, p.field);
        break;
      }
    }
  }
  return out;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

ComponentBundle invert_stage(const Stage& stage, const ComponentBundle& in) {
  ComponentBundle out;
  switch (stage.kind) {
    case StageKind::SignSplit:
      for (const Component& c : in.components()) {
        if (ends_with(c.name, "-")) continue;
        require(ends_with(c.name, "+"), ErrorCode::ShapeMismatch, "component '" + c.name + "' is not a sign part");
        const std::string base = c.name.substr(0, c.name.size() - 1);
        require(in.contains(base + "-"), ErrorCode::ShapeMismatch, "component '" + base + "-' is missing");
        out.add(base, combine_parts(c.field, in.at(base + "-")));
      }
      break;
    case StageKind::Derivative:
      for (const Component& c : in.components()) {
        require(ends_with(c.name, "'"), ErrorCode::ShapeMismatch, "component '" + c.name + "' is not a derivative");
        out.add(c.name.substr(0, c.name.size() - 1), map_rows(c.field, [](std::span<const double> row, const Grid1D& g) {
                  return cumulative(row, g);
                }));
      }
      break;
    case StageKind::Radon:
      for (const Component& c : in.components()) {
        const auto* g = std::get_if<Sinogram>(&c.field);
        require(g != nullptr, ErrorCode::ShapeMismatch, "component '" + c.name + "' is not a sinogram");
        out.add(c.name, radon_invert(*g, g->image_dim(), stage.tol, stage.max_iter).image);
      }
      break;
    case StageKind::FourierPermute: {
      const auto& names = fourier_component_names();
      for (const Component& c : in.components()) {
        if (!ends_with(c.name, "." + names.front())) continue;
        const std::string base = c.name.substr(0, c.name.size() - names.front().size() - 1);
        const auto* img = std::get_if<Image2D>(&c.field);
        require(img != nullptr, ErrorCode::ShapeMismatch, "Fourier component '" + c.name + "' is not an image");
        out.add(base, fourier_unpermute(in, 2 * img->dim(), img->extent(), base + ".").image);
      }
      break;
    }
  }
  return out;
}

}  // namespace

std::string field_kind(const Field& f) {
  return std::visit(Overloaded{[](const PwcFunction1D&) { return std::string("function1d"); },
                               [](const Image2D&) { return std::string("image2d"); },
                               [](const Sinogram&) { return std::string("sinogram"); }},
                    f);
}

std::size_t field_rows(const Field& f) {
  return std::visit(Overloaded{[](const PwcFunction1D&) { return std::size_t{1}; },
                               [](const Image2D& u) { return u.dim(); }, [](const Sinogram& g) { return g.angles(); }},
                    f);
}

std::size_t field_row_length(const Field& f) {
  return std::visit(Overloaded{[](const PwcFunction1D& u) { return u.cells(); },
                               [](const Image2D& u) { return u.dim(); }, [](const Sinogram& g) { return g.bins(); }},
                    f);
}

std::vector<double> field_values(const Field& f) {
  return std::visit([](const auto& x) { return std::vector<double>(x.values().begin(), x.values().end()); }, f);
}

double field_norm(const Field& f) {
  double s = 0.0;
  for (double x : field_values(f)) s += x * x;
  return std::sqrt(s);
}

Field field_subtract(const Field& a, const Field& b) {
  require(same_shape(a, b), ErrorCode::ShapeMismatch, "fields differ in shape");
  if (const auto* u = std::get_if<PwcFunction1D>(&a)) {
    const auto& v = std::get<PwcFunction1D>(b);
    std::vector<double> d(u->cells());
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = u->value(j) - v.value(j);
    return PwcFunction1D(u->grid(), std::move(d));
  }
  return combine_parts(a, b);
}

// ---------------------------------------------------------------- bundles

ComponentBundle::ComponentBundle(std::vector<Component> components) {
  for (auto& c : components) add(std::move(c.name), std::move(c.field));
}

void ComponentBundle::add(std::string name, Field field) {
  require(!contains(name), ErrorCode::InvalidArgument, "duplicate component name '" + name + "'");
  components_.push_back({std::move(name), std::move(field)});
}

const Field& ComponentBundle::at(const std::string& name) const {
  for (const auto& c : components_) {
    if (c.name == name) return c.field;
  }
  fail(ErrorCode::InvalidArgument, "no component named '" + name + "'");
}

bool ComponentBundle::contains(const std::string& name) const {
  return std::any_of(components_.begin(), components_.end(), [&](const Component& c) { return c.name == name; });
}

std::vector<std::string> ComponentBundle::names() const {
  std::vector<std::string> out;
  for (const auto& c : components_) out.push_back(c.name);
  return out;
}

// ---------------------------------------------------------------- chains

std::string stage_name(StageKind kind) {
  switch (kind) {
    case StageKind::SignSplit:
      return "sign-split";
    case StageKind::Derivative:
      return "derivative";
    case StageKind::Radon:
      return "radon";
    case StageKind::FourierPermute:
      return "fourier-permute";
  }
  return "unknown";
}

TransformChain& TransformChain::sign_split() {
  stages_.push_back({StageKind::SignSplit});
  return *this;
}

TransformChain& TransformChain::derivative() {
  stages_.push_back({StageKind::Derivative});
  return *this;
}

TransformChain& TransformChain::radon(RadonGeometry geometry, double tol, std::size_t max_iter) {
  stages_.push_back({StageKind::Radon, geometry, tol, max_iter});
  return *this;
}

TransformChain& TransformChain::fourier_permute() {
  stages_.push_back({StageKind::FourierPermute});
  return *this;
}

std::string TransformChain::describe() const {
  if (stages_.empty()) return "identity";
  std::string out;
  for (const Stage& s : stages_) {
    if (!out.empty()) out += " -> ";
    out += stage_name(s.kind);
    if (s.kind == StageKind::Radon) {
      out += "(angles=" + std::to_string(s.geometry.angles) + ", oversample=" + std::to_string(s.geometry.oversample) +
             ")";
    }
  }
  return out;
}

ComponentBundle apply_chain(const TransformChain& chain, const Field& u) {
  ComponentBundle b;
  b.add(kBaseComponent, u);
  for (const Stage& s : chain.stages()) b = apply_stage(s, b);
  return b;
}

Field invert_chain(const TransformChain& chain, const ComponentBundle& bundle) {
  ComponentBundle b = bundle;
  for (auto it = chain.stages().rbegin(); it != chain.stages().rend(); ++it) b = invert_stage(*it, b);
  require(b.size() == 1, ErrorCode::ShapeMismatch, "inversion left " + std::to_string(b.size()) + " components");
  return b[0].field;
}

// ---------------------------------------------------------------- Fourier

const std::vector<std::string>& fourier_component_names() {
  static const std::vector<std::string> names = {"Re-oo", "Re-eo", "Re-oe", "Re-ee",
                                                 "Im-oo", "Im-eo", "Im-oe", "Im-ee"};
  return names;
}

std::vector<std::complex<double>> dft2(const std::vector<std::complex<double>>& data, std::size_t dim, bool inverse) {
  require(data.size() == dim * dim, ErrorCode::ShapeMismatch, "DFT input is not D x D");
  const int n = static_cast<int>(dim);
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * data.size()));
  require(buf != nullptr, ErrorCode::InvalidArgument, "FFT buffer allocation failed");
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_2d(n, n, buf, buf, inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    buf[i][0] = data[i].real();
    buf[i][1] = data[i].imag();
  }
  fftw_execute(plan);
  const double scale = 1.0 / static_cast<double>(dim);
  std::vector<std::complex<double>> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = {buf[i][0] * scale, buf[i][1] * scale};
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
  return out;
}

namespace {

constexpr std::size_t kParity[4][2] = {{1, 1}, {0, 1}, {1, 0}, {0, 0}};  // oo, eo, oe, ee as (row, column)

}  // namespace

ComponentBundle fourier_permute(const Image2D& u) {
  const std::size_t d = u.dim();
  require(d % 2 == 0, ErrorCode::OddDimension, "Fourier permutation needs an even dimension");
  std::vector<std::complex<double>> data(d * d);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = u.values()[i];
  const auto spec = dft2(data, d, false);
  const std::size_t h = d / 2;
  const auto& names = fourier_component_names();
  ComponentBundle out;
  for (std::size_t part = 0; part < 2; ++part) {
    for (std::size_t k = 0; k < 4; ++k) {
      std::vector<double> v(h * h);
      for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < h; ++j) {
          const auto& z = spec[(2 * i + kParity[k][0]) * d + 2 * j + kParity[k][1]];
          v[i * h + j] = part == 0 ? z.real() : z.imag();
        }
      }
      out.add(names[part * 4 + k], Image2D(h, u.extent(), std::move(v)));
    }
  }
  return out;
}

FourierInverse fourier_unpermute(const ComponentBundle& bundle, std::size_t dim, Extent extent,
                                 const std::string& prefix) {
  require(dim % 2 == 0, ErrorCode::OddDimension, "Fourier permutation needs an even dimension");
  const std::size_t h = dim / 2;
  const auto& names = fourier_component_names();
  std::vector<std::complex<double>> spec(dim * dim);
  for (std::size_t part = 0; part < 2; ++part) {
    for (std::size_t k = 0; k < 4; ++k) {
      const auto* img = std::get_if<Image2D>(&bundle.at(prefix + names[part * 4 + k]));
      require(img != nullptr && img->dim() == h, ErrorCode::ShapeMismatch,
              "Fourier component '" + prefix + names[part * 4 + k] + "' has the wrong shape");
      for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < h; ++j) {
          auto& z = spec[(2 * i + kParity[k][0]) * dim + 2 * j + kParity[k][1]];
          if (part == 0) {
            z.real(img->at(i, j));
          } else {
            z.imag(img->at(i, j));
          }
        }
      }
    }
  }
  // Hermitian symmetrization: average with the conjugate of the reflected spectrum.
  std::vector<std::complex<double>> sym(spec.size());
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = 0; b < dim; ++b) {
      const std::size_t ra = (dim - a) % dim, rb = (dim - b) % dim;
      sym[a * dim + b] = 0.5 * (spec[a * dim + b] + std::conj(spec[ra * dim + rb]));
    }
  }
  const auto back = dft2(sym, dim, true);
  std::vector<double> re(back.size());
  double re2 = 0.0, im2 = 0.0;
  for (std::size_t i = 0; i < back.size(); ++i) {
    re[i] = back[i].real();
    re2 += re[i] * re[i];
    im2 += back[i].imag() * back[i].imag();
  }
  FourierInverse out{Image2D(dim, extent, std::move(re)), 0.0};
  out.imaginary_residue = re2 > 0.0 ? std::sqrt(im2 / re2) : std::sqrt(im2);
  return out;
}

// ---------------------------------------------------------------- interpolation

namespace {

// Rows below this fraction of the component's peak are treated as empty.
constexpr double kEmptyRow = 1e-13;

Field interp_rows(const Field& a, const Field& b, double lambda) {
  require(same_shape(a, b), ErrorCode::ShapeMismatch, "components differ in shape");
  if (const auto* ga = std::get_if<Sinogram>(&a)) return interp_sinograms(*ga, std::get<Sinogram>(b), lambda);
  if (const auto* ua = std::get_if<PwcFunction1D>(&a)) {
    const auto& ub = std::get<PwcFunction1D>(b);
    return resample(interp_signed(*ua, ub, lambda), ua->grid());
  }
  const auto& ia = std::get<Image2D>(a);
  const auto& ib = std::get<Image2D>(b);
  const Grid1D grid = row_grid(a);
  const std::size_t d = ia.dim();
  Image2D out = Image2D::zeros(d, ia.extent());
  double scale = 0.0;
  for (double x : ia.values()) scale = std::max(scale, std::abs(x));
  for (double x : ib.values()) scale = std::max(scale, std::abs(x));
  parallel_for(d, [&](std::size_t r) {
    const PwcFunction1D ra(grid, std::vector<double>(ia.values().begin() + static_cast<std::ptrdiff_t>(r * d),
                                                     ia.values().begin() + static_cast<std::ptrdiff_t>((r + 1) * d)));
    const PwcFunction1D rb(grid, std::vector<double>(ib.values().begin() + static_cast<std::ptrdiff_t>(r * d),
                                                     ib.values().begin() + static_cast<std::ptrdiff_t>((r + 1) * d)));
    const bool za = ra.max_abs() <= kEmptyRow * scale, zb = rb.max_abs() <= kEmptyRow * scale;
    if (za && zb) return;
    try {
      if (za || zb) fail(ErrorCode::BothPartsZero, std::string(za ? "first" : "second") + " row is empty");
      const PwcFunction1D mid = resample(interp_signed(ra, rb, lambda), grid);
      for (std::size_t j = 0; j < d; ++j) out.at(r, j) = mid.value(j);
    } catch (const Error& e) {
      throw Error(e.code(), "row " + std::to_string(r) + ": " + e.detail());
    }
  });
  return out;
}

}  // namespace

ComponentBundle interp_bundles(const ComponentBundle& b1, const ComponentBundle& b2, double lambda) {
  require(b1.names() == b2.names(), ErrorCode::ShapeMismatch, "bundles carry different components");
  ComponentBundle out;
  for (std::size_t i = 0; i < b1.size(); ++i) {
    try {
      out.add(b1[i].name, interp_rows(b1[i].field, b2[i].field, lambda));
    } catch (const Error& e) {
      throw Error(e.code(), "component " + b1[i].name + ": " + e.detail());
    }
  }
  return out;
}

Field interp_via_transform(const TransformChain& chain, const Field& u1, const Field& u2, double lambda) {
  require(std::isfinite(lambda) && lambda >= 0.0 && lambda <= 1.0, ErrorCode::InvalidArgument,
          "interpolation parameter must lie in [0, 1]");
  if (chain.empty()) {
    const auto* a = std::get_if<PwcFunction1D>(&u1);
    const auto* b = std::get_if<PwcFunction1D>(&u2);
    if (a != nullptr && b != nullptr) return interp_signed(*a, *b, lambda);
  }
  return invert_chain(chain, interp_bundles(apply_chain(chain, u1), apply_chain(chain, u2), lambda));
}

// ---------------------------------------------------------------- singular-value study

TransportSvdStudy transport_svd_study(const std::vector<Image2D>& family, const TransformChain& chain,
                                      std::size_t levels) {
  require(family.size() >= 2, ErrorCode::InvalidArgument, "the study needs at least two members");
  require(!chain.empty() && chain.stages().back().kind == StageKind::Radon, ErrorCode::InvalidArgument,
          "the study chain must end in a Radon stage");
  const std::size_t n = family.size();
  std::vector<ComponentBundle> bundles(n);
  parallel_for(n, [&](std::size_t i) { bundles[i] = apply_chain(chain, family[i]); });
  for (const auto& b : bundles) {
    require(b.names() == bundles[0].names(), ErrorCode::ShapeMismatch, "family members transform differently");
  }
  const std::size_t components = bundles[0].size();
  const auto& first = std::get<Sinogram>(bundles[0][0].field);
  const std::size_t angles = first.angles();
  const std::vector<double> ys = interior_levels(levels);

  std::vector<std::vector<double>> per_angle(angles);
  std::vector<std::size_t> blocks(angles, 0);
  parallel_for(angles, [&](std::size_t p) {
    std::vector<std::vector<double>> stacked(n);
    for (std::size_t c = 0; c < components; ++c) {
      std::vector<SignedParts> parts;
      parts.reserve(n);
      for (std::size_t i = 0; i < n; ++i) parts.push_back(split_signs(std::get<Sinogram>(bundles[i][c].field).slice(p)));
      for (int sign = 0; sign < 2; ++sign) {
        bool usable = true;
        for (std::size_t i = 0; i < n && usable; ++i) {
          const PwcFunction1D& part = sign == 0 ? parts[i].plus : parts[i].minus;
          const PwcFunction1D whole = std::get<Sinogram>(bundles[i][c].field).slice(p);
          usable = !vanishes(part, whole) && whole.max_abs() > 0.0;
        }
        if (!usable) continue;
        ++blocks[p];
        for (std::size_t i = 0; i < n; ++i) {
          const PwcFunction1D& part = sign == 0 ? parts[i].plus : parts[i].minus;
          const std::vector<double> s = sample_quantile(pseudo_inverse(cdf(part)), ys);
          stacked[i].insert(stacked[i].end(), s.begin(), s.end());
        }
      }
    }
    if (blocks[p] == 0) return;
    const auto rows = static_cast<Eigen::Index>(stacked[0].size());
    Eigen::MatrixXd a(rows, static_cast<Eigen::Index>(n - 1));
    Eigen::Index col = 0;
    for (std::size_t i = 1; i < n; ++i) {
      Eigen::VectorXd d(rows);
      for (Eigen::Index r = 0; r < rows; ++r) {
        d(r) = stacked[i][static_cast<std::size_t>(r)] - stacked[0][static_cast<std::size_t>(r)];
      }
      const double norm = d.norm();
      a.col(col++) = norm > 0.0 ? Eigen::VectorXd(d / norm) : d;
    }
    per_angle[p] = jacobi_svd(a).singular_values;
  });

  TransportSvdStudy out;
  for (std::size_t p = 0; p < angles; ++p) {
    if (blocks[p] == 0) continue;
    out.per_angle.push_back(std::move(per_angle[p]));
    out.angles_used.push_back(p);
    out.blocks_per_angle.push_back(blocks[p]);
  }
  require(!out.per_angle.empty(), ErrorCode::EmptyInput, "no angle had a usable component");
  out.stats = singular_stats(out.per_angle);

  const std::size_t pixels = family[0].values().size();
  Eigen::MatrixXd raw(static_cast<Eigen::Index>(pixels), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    require(family[i].values().size() == pixels, ErrorCode::ShapeMismatch, "family members differ in size");
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(family[i].values().data(), static_cast<Eigen::Index>(pixels));
    const double norm = v.norm();
    raw.col(static_cast<Eigen::Index>(i)) = norm > 0.0 ? Eigen::VectorXd(v / norm) : v;
  }
  out.raw_singular_values = jacobi_svd(raw).singular_values;
  return out;
}

}  // namespace dinterp
