// Python bindings for the core library.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dinterp/dinterp1d.hpp"
#include "dinterp/error.hpp"
#include "dinterp/grid1d.hpp"
#include "dinterp/io.hpp"
#include "dinterp/lowrank.hpp"
#include "dinterp/parallel.hpp"
#include "dinterp/radon.hpp"
#include "dinterp/scenarios.hpp"
#include "dinterp/transform.hpp"

namespace py = pybind11;
using namespace dinterp;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(std::span<const double> v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<double> to_vector(const Array& a) {
  require(a.ndim() == 1, ErrorCode::ShapeMismatch, "expected a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

Array image_array(const Image2D& u) {
  const auto d = static_cast<py::ssize_t>(u.dim());
  Array out({d, d});
  std::copy(u.values().begin(), u.values().end(), out.mutable_data());
  return out;
}

Image2D image_from(const Array& a, Extent extent) {
  require(a.ndim() == 2 && a.shape(0) == a.shape(1), ErrorCode::ShapeMismatch, "expected a square 2D array");
  return Image2D(static_cast<std::size_t>(a.shape(0)), extent, std::vector<double>(a.data(), a.data() + a.size()));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Displacement interpolation of densities, signed functions and images";

  // Messages start with the error code, e.g. "ZeroMass: density has no mass".
  py::register_exception<Error>(m, "DinterpError", PyExc_RuntimeError);

  py::class_<Grid1D>(m, "Grid1D")
      .def(py::init([](const Array& edges) { return Grid1D(to_vector(edges)); }), py::arg("edges"))
      .def_static("uniform", &Grid1D::uniform, py::arg("a"), py::arg("b"), py::arg("cells"))
      .def_property_readonly("cells", &Grid1D::cells)
      .def_property_readonly("edges", [](const Grid1D& g) { return to_array(g.edges()); })
      .def_property_readonly("centers", [](const Grid1D& g) {
        std::vector<double> c(g.cells());
        for (std::size_t j = 0; j < c.size(); ++j) c[j] = g.center(j);
        return to_array(c);
      })
      .def("__eq__", [](const Grid1D& a, const Grid1D& b) { return a == b; });

  py::class_<PwcFunction1D>(m, "PwcFunction1D")
      .def(py::init([](const Grid1D& g, const Array& v) { return PwcFunction1D(g, to_vector(v)); }), py::arg("grid"),
           py::arg("values"))
      .def_property_readonly("grid", &PwcFunction1D::grid)
      .def_property_readonly("values", [](const PwcFunction1D& u) { return to_array(u.values()); })
      .def("mass", &PwcFunction1D::mass)
      .def("evaluate", &PwcFunction1D::evaluate, py::arg("x"));

  py::class_<QuantileCurve>(m, "QuantileCurve")
      .def_property_readonly("ys", [](const QuantileCurve& q) { return to_array(q.ys()); })
      .def_property_readonly("xs", [](const QuantileCurve& q) { return to_array(q.xs()); })
      .def("left_limit", &QuantileCurve::left_limit)
      .def("right_limit", &QuantileCurve::right_limit);

  m.def("quantile", [](const PwcFunction1D& u) { return pseudo_inverse(cdf(u)); }, py::arg("u"),
        "Quantile curve of a nonnegative density");
  m.def("resample", &resample, py::arg("u"), py::arg("grid"));

  m.def("interp_nonneg", &interp_nonneg, py::arg("u1"), py::arg("u2"), py::arg("lam"));
  m.def("interp_signed", &interp_signed, py::arg("u1"), py::arg("u2"), py::arg("lam"));
  m.def("interp_bary", [](const std::vector<PwcFunction1D>& us, const std::vector<double>& w) {
        return interp_bary(us, InterpWeights(w));
      }, py::arg("members"), py::arg("weights"));
  m.def("barycentric_weights", [](const std::vector<double>& alpha, const std::vector<std::vector<double>>& nodes,
                                  const std::vector<std::vector<std::size_t>>& simplices) {
        const InterpWeights w = barycentric_weights(alpha, nodes, simplices);
        return std::vector<double>(w.lambdas().begin(), w.lambdas().end());
      }, py::arg("alpha"), py::arg("nodes"), py::arg("simplices"));
  m.def("interp_derivative_split", &interp_derivative_split, py::arg("p1"), py::arg("p2"), py::arg("lam"));
  m.def("transport_map", [](const PwcFunction1D& a, const PwcFunction1D& b) {
        return to_array(transport_map(a, b));
      }, py::arg("u1"), py::arg("u2"));

  m.def("interior_levels", &interior_levels, py::arg("count"));
  m.def("jacobi_svd", [](const Eigen::MatrixXd& a) {
        SvdResult r = jacobi_svd(a);
        return py::make_tuple(r.u, r.singular_values, r.v);
      }, py::arg("a"), "Thin SVD (U, s, V) by one-sided Jacobi rotations");
  m.def("snapshot_singular_values", [](const std::vector<PwcFunction1D>& us, std::size_t levels) {
        std::vector<QuantileCurve> curves;
        for (const auto& u : us) curves.push_back(pseudo_inverse(cdf(u)));
        return svd(build_snapshots(curves, interior_levels(levels))).singular_values;
      }, py::arg("members"), py::arg("levels") = 512);
  m.def("isotonic_fit", [](const Array& v) { return to_array(isotonic_fit(to_vector(v))); }, py::arg("values"));

  m.def("radon_forward", [](const Array& img, std::size_t angles, double oversample) {
        const Sinogram g = radon_forward(image_from(img, {}), {angles, oversample});
        Array out({static_cast<py::ssize_t>(g.angles()), static_cast<py::ssize_t>(g.bins())});
        std::copy(g.values().begin(), g.values().end(), out.mutable_data());
        return out;
      }, py::arg("image"), py::arg("angles") = 0, py::arg("oversample") = 2.0,
      "Sinogram (angles x bins) of an image on the unit square");
  m.def("dinterp2d", [](const Array& a, const Array& b, double lam, std::size_t angles, double oversample, double tol) {
        const Dinterp2dResult r = dinterp2d(image_from(a, {}), image_from(b, {}), lam, {angles, oversample}, tol);
        return image_array(r.image);
      }, py::arg("u1"), py::arg("u2"), py::arg("lam"), py::arg("angles") = 0, py::arg("oversample") = 2.0,
      py::arg("tol") = 1e-8, "2D displacement interpolation of images on the unit square");
  m.def("radon_round_trip", [](const Array& a, std::size_t angles, double tol) {
        const Image2D u = image_from(a, {});
        return image_array(radon_invert(radon_forward(u, {angles, 2.0}), u.dim(), tol).image);
      }, py::arg("image"), py::arg("angles") = 0, py::arg("tol") = 1e-8);
  m.def("fourier_round_trip", [](const Array& a) {
        TransformChain c;
        c.fourier_permute();
        return image_array(std::get<Image2D>(invert_chain(c, apply_chain(c, Field(image_from(a, {}))))));
      }, py::arg("image"));

  m.def("hat", [](double w, double t, const Grid1D& g) { return hat(w, t, g); }, py::arg("w"), py::arg("t"),
        py::arg("grid"));
  m.def("random_hats", &random_hats, py::arg("n"), py::arg("seed"), py::arg("grid"));
  m.def("acoustics_grid", &acoustics_grid);
  m.def("acoustics_pressure", [](double t, double w, double c, const Grid1D& g) {
        return acoustics_pressure(t, w, c, g, Sampling::CellCenter);
      }, py::arg("t"), py::arg("w") = 0.05, py::arg("c") = 1.0, py::arg("grid"));
  m.def("oscillatory", [](double k, double sigma2, std::size_t dim) { return image_array(oscillatory(k, sigma2, dim)); },
        py::arg("k"), py::arg("sigma2"), py::arg("dim"));

  m.def("read_density", [](const std::string& p) { return read_density(fs::path(p)); }, py::arg("path"));
  m.def("write_density", [](const std::string& p, const PwcFunction1D& u) { write_density(fs::path(p), u); },
        py::arg("path"), py::arg("u"));
  m.def("set_thread_count", &set_thread_count, py::arg("threads"));
}
