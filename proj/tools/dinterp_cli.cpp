// Command-line driver: one subcommand per standard experiment plus file-based
// interpolation. Every run writes its outputs and a manifest.json into
// --out-dir; `replay` re-runs a manifest.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dinterp/dinterp1d.hpp"
#include "dinterp/error.hpp"
#include "dinterp/grid1d.hpp"
#include "dinterp/io.hpp"
#include "dinterp/lowrank.hpp"
#include "dinterp/parallel.hpp"
#include "dinterp/radon.hpp"
#include "dinterp/scenarios.hpp"
#include "dinterp/transform.hpp"

namespace {

using namespace dinterp;

constexpr const char* kToolVersion = "1.0.0";

struct Options {
  std::size_t grid = 0;  // 0 selects the subcommand default
  std::string domain;
  std::vector<double> lambdas;
  std::vector<double> weights;
  std::size_t angles = 0;
  double oversample = 2.0;
  double tol = 1e-8;
  std::size_t max_iter = 0;
  std::uint64_t seed = 42;
  std::size_t threads = 0;
  std::string out_dir = "out";
  bool quick = false;
  bool plot = false;

  // Subcommand specific.
  std::string input1, input2;
  std::vector<std::string> inputs;
  std::vector<double> alpha;
  std::string nodes;
  bool is_signed = false;
  std::size_t members = 50;
  std::size_t levels = 0;
  bool report_singvals = false;
  std::string manifest;
};

// Output directory plus the list of files written, in order.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }
  fs::path path(const std::string& name) {
    names_.push_back(name);
    return dir_ / name;
  }
  const fs::path& dir() const { return dir_; }
  const std::vector<std::string>& names() const { return names_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

struct Curve {
  std::string label;
  const PwcFunction1D* f;
};

// Static line plot of cell values against cell centres.
void write_svg(const fs::path& path, const std::vector<Curve>& curves, const std::string& title) {
  constexpr double W = 800, H = 480, M = 50;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& c : curves) {
    x0 = std::min(x0, c.f->grid().left());
    x1 = std::max(x1, c.f->grid().right());
    for (double v : c.f->values()) {
      y0 = std::min(y0, v);
      y1 = std::max(y1, v);
    }
  }
  if (!(y1 > y0)) y1 = y0 + 1.0;
  const auto px = [&](double x) { return M + (x - x0) / (x1 - x0) * (W - 2 * M); };
  const auto py = [&](double y) { return H - M - (y - y0) / (y1 - y0) * (H - 2 * M); };
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::InvalidArgument, "cannot write " + path.string());
  char buf[128];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << M << "\" y=\"30\" font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
  out << "<rect x=\"" << M << "\" y=\"" << M << "\" width=\"" << W - 2 * M << "\" height=\"" << H - 2 * M
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const double hue = 360.0 * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(curves.size(), 1));
    std::snprintf(buf, sizeof buf, "hsl(%.0f,70%%,40%%)", hue);
    out << "<polyline fill=\"none\" stroke=\"" << buf << "\" stroke-width=\"1\" points=\"";
    const auto& f = *curves[i].f;
    for (std::size_t j = 0; j < f.cells(); ++j) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(f.grid().center(j)), py(f.value(j)));
      out << buf;
    }
    out << "\"><title>" << curves[i].label << "</title></polyline>\n";
  }
  out << "</svg>\n";
}

void check_finite(std::span<const double> values, const std::string& what) {
  for (double v : values) require(std::isfinite(v), ErrorCode::InvariantViolation, what + " has non-finite values");
}

void check_nonneg(const PwcFunction1D& u, const std::string& what) {
  check_finite(u.values(), what);
  for (double v : u.values()) require(v >= 0.0, ErrorCode::InvariantViolation, what + " has negative values");
}

std::pair<double, double> parse_domain(const std::string& text, double a, double b) {
  if (text.empty()) return {a, b};
  const auto comma = text.find(',');
  require(comma != std::string::npos, ErrorCode::InvalidArgument, "--domain expects a,b");
  const double lo = std::stod(text.substr(0, comma));
  const double hi = std::stod(text.substr(comma + 1));
  require(hi > lo, ErrorCode::InvalidArgument, "--domain needs a < b");
  return {lo, hi};
}

Grid1D grid_1d(const Options& o, double a, double b, std::size_t cells = 1000) {
  const auto [lo, hi] = parse_domain(o.domain, a, b);
  return Grid1D::uniform(lo, hi, o.grid ? o.grid : cells);
}

std::size_t grid_2d(const Options& o) { return o.grid ? o.grid : (o.quick ? 64 : 128); }

RadonGeometry geometry(const Options& o) { return {o.angles, o.oversample}; }

// Result on the target grid, keeping the object untouched when it already lives there.
PwcFunction1D on_grid(const PwcFunction1D& u, const Grid1D& g) { return u.grid() == g ? u : resample(u, g); }

std::string indexed(const std::string& stem, std::size_t i, const std::string& ext = ".csv") {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%02zu", i);
  return stem + buf + ext;
}

Json geometry_json(const Options& o, std::size_t dim) {
  const RadonGeometry g = resolve_geometry(dim, geometry(o));
  return Json{{"D", dim}, {"angles", g.angles}, {"oversample", g.oversample}};
}

Json tolerance_json(const Options& o) { return Json{{"tol", o.tol}, {"max_iter", o.max_iter}}; }

using Runner = void (*)(const Options&, Outputs&, RunManifest&);

void run_pair(const Options& o, Outputs& out, RunManifest& m) {
  PwcFunction1D u1 = PwcFunction1D::zeros(Grid1D::uniform(0, 1, 1));
  PwcFunction1D u2 = u1;
  if (!o.input1.empty() || !o.input2.empty()) {
    require(!o.input1.empty() && !o.input2.empty(), ErrorCode::InvalidArgument, "--input1 and --input2 go together");
    u1 = read_density(fs::path(o.input1));
    u2 = read_density(fs::path(o.input2));
    m.scenario = {"files", {}, o.input1 + " | " + o.input2};
  } else {
    const Grid1D g = grid_1d(o, 0.0, 1.0);
    const auto fam = transport_family(6, 0.05, g);
    u1 = fam.front();
    u2 = fam.back();
    m.scenario = {"transport-hats", {{"w", 0.05}, {"n1", 1}, {"n2", 6}}, "advected hat members 1 and 6"};
  }
  const std::vector<double> lambdas = o.lambdas.empty() ? std::vector<double>{0.5} : o.lambdas;
  std::vector<PwcFunction1D> results;
  Json masses = Json::array();
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double l = lambdas[i];
    const PwcFunction1D r = on_grid(o.is_signed ? interp_signed(u1, u2, l) : interp_nonneg(u1, u2, l), u1.grid());
    if (o.is_signed) {
      check_finite(r.values(), "interpolant");
    } else {
      check_nonneg(r, "interpolant");
    }
    write_density(out.path(indexed("pair", i)), r);
    masses.push_back(Json{{"lambda", l}, {"mass", r.mass()}});
    results.push_back(r);
  }
  m.results["interpolants"] = masses;
  if (o.plot) {
    std::vector<Curve> c;
    for (std::size_t i = 0; i < results.size(); ++i) c.push_back({"lambda=" + format_double(lambdas[i]), &results[i]});
    write_svg(out.path("pair.svg"), c, "pair interpolants");
  }
}

std::vector<std::vector<double>> parse_nodes(const std::string& text) {
  std::vector<std::vector<double>> nodes;
  std::stringstream outer(text);
  std::string point;
  while (std::getline(outer, point, ';')) {
    std::vector<double> p;
    std::stringstream inner(point);
    std::string v;
    while (std::getline(inner, v, ',')) p.push_back(std::stod(v));
    nodes.push_back(std::move(p));
  }
  return nodes;
}

void run_bary(const Options& o, Outputs& out, RunManifest& m) {
  std::vector<PwcFunction1D> us;
  std::vector<std::vector<double>> nodes;
  if (o.inputs.empty()) {
    const auto triple = two_param_triple(grid_1d(o, 0.0, 1.0));
    us.assign(triple.begin(), triple.end());
    nodes = two_param_nodes();
    m.scenario = {"two-param-triple", {}, "stand-in three-member two-parameter family"};
  } else {
    for (const auto& p : o.inputs) us.push_back(read_density(fs::path(p)));
    if (!o.nodes.empty()) nodes = parse_nodes(o.nodes);
    m.scenario = {"files", {}, std::to_string(us.size()) + " density files"};
  }
  InterpWeights w({1.0});
  if (!o.alpha.empty()) {
    require(o.weights.empty(), ErrorCode::InvalidArgument, "give either --weights or --alpha");
    require(nodes.size() == us.size(), ErrorCode::InvalidArgument, "--alpha needs one node per member (--nodes)");
    std::vector<std::size_t> all(us.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    w = barycentric_weights(o.alpha, nodes, {all});
  } else {
    std::vector<double> lw = o.weights;
    if (lw.empty()) lw.assign(us.size(), 1.0 / static_cast<double>(us.size()));
    require(lw.size() == us.size(), ErrorCode::InvalidArgument, "--weights needs one value per member");
    w = InterpWeights(lw);
  }
  const PwcFunction1D r = on_grid(interp_bary(us, w), us.front().grid());
  check_finite(r.values(), "interpolant");
  write_density(out.path("bary.csv"), r);
  m.results["weights"] = std::vector<double>(w.lambdas().begin(), w.lambdas().end());
  m.results["mass"] = r.mass();
  if (o.plot) write_svg(out.path("bary.svg"), {{"interpolant", &r}}, "barycentric interpolant");
}

void run_hats(const Options& o, Outputs& out, RunManifest& m) {
  const Grid1D g = grid_1d(o, 0.0, 1.0);
  const std::size_t q = o.levels ? o.levels : 512;
  const auto hats = random_hats(o.members, o.seed, g);
  std::vector<QuantileCurve> curves;
  for (const auto& h : hats) curves.push_back(pseudo_inverse(cdf(h)));
  const SnapshotMatrix snaps = build_snapshots(curves, interior_levels(q));
  const ModeBasis basis = svd(snaps);
  write_singular_values(out.path("singular_values.csv"), basis.singular_values);
  write_mode_basis(out.path("modes.csv"), basis);
  m.scenario = {"random-hats", {{"members", static_cast<double>(o.members)}, {"levels", static_cast<double>(q)}},
                "hats with (t, w) drawn from (0.1, 0.9) x (0, 0.1)"};
  const auto& s = basis.singular_values;
  m.results["s2_over_s1"] = s.size() > 1 ? s[1] / s[0] : 0.0;
  m.results["s3_over_s1"] = s.size() > 2 ? s[2] / s[0] : 0.0;
  m.results["warnings"] = snaps.warnings;
  if (o.plot) {
    std::vector<Curve> c;
    for (std::size_t i = 0; i < std::min<std::size_t>(hats.size(), 10); ++i) c.push_back({indexed("hat", i, ""), &hats[i]});
    write_svg(out.path("hats.svg"), c, "random hats (first ten)");
  }
}

void run_two_param(const Options& o, Outputs& out, RunManifest& m) {
  const Grid1D g = grid_1d(o, 0.0, 1.0);
  const auto triple = two_param_triple(g);
  const auto nodes = two_param_nodes();
  const auto queries = two_param_queries();
  std::vector<PwcFunction1D> results;
  Json table = Json::array();
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const InterpWeights w = barycentric_weights(queries[i], nodes, {{0, 1, 2}});
    const PwcFunction1D r = on_grid(interp_bary(triple, w), g);
    check_nonneg(r, "interpolant");
    write_density(out.path(indexed("two_param", i)), r);
    table.push_back(Json{{"alpha", queries[i]}, {"weights", std::vector<double>(w.lambdas().begin(), w.lambdas().end())},
                         {"mass", r.mass()}});
    results.push_back(r);
  }
  for (std::size_t i = 0; i < triple.size(); ++i) write_density(out.path(indexed("member", i)), triple[i]);
  m.scenario = {"two-param-triple", {}, "stand-in three-member two-parameter family, twelve queries"};
  m.results["queries"] = table;
  if (o.plot) {
    std::vector<Curve> c;
    for (std::size_t i = 0; i < results.size(); ++i) c.push_back({indexed("query", i, ""), &results[i]});
    write_svg(out.path("two_param.svg"), c, "two-parameter interpolants");
  }
}

void run_wavelet(const Options& o, Outputs& out, RunManifest& m) {
  const Grid1D g = o.grid || !o.domain.empty() ? grid_1d(o, -16.0, 16.0, 3200) : wavelet_grid();
  const auto triple = wavelet_triple(g);
  std::vector<double> lambdas = o.lambdas;
  if (lambdas.empty()) lambdas = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<PwcFunction1D> results;
  Json table = Json::array();
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double l = lambdas[i];
    const PwcFunction1D dil = on_grid(interp_signed(triple[0], triple[1], l), g);
    const PwcFunction1D tr = on_grid(interp_signed(triple[0], triple[2], l), g);
    check_finite(dil.values(), "dilation interpolant");
    check_finite(tr.values(), "translation interpolant");
    write_density(out.path(indexed("dilation", i)), dil);
    write_density(out.path(indexed("translation", i)), tr);
    const PwcFunction1D exact = wavelet_atom(1.0, l, g);
    double err = 0.0;
    for (std::size_t j = 0; j < g.cells(); ++j) err = std::max(err, std::abs(tr.value(j) - exact.value(j)));
    table.push_back(Json{{"lambda", l}, {"translation_linf_error", err}});
    results.push_back(dil);
    results.push_back(tr);
  }
  m.scenario = {"wavelet", {}, "Mexican-hat atoms psi, psi dilated by 2, psi shifted by 1"};
  m.results["sweeps"] = table;
  if (o.plot) {
    std::vector<Curve> c;
    for (std::size_t i = 0; i < results.size(); ++i) c.push_back({indexed("curve", i, ""), &results[i]});
    write_svg(out.path("wavelet.svg"), c, "wavelet sweeps");
  }
}

void run_acoustics(const Options& o, Outputs& out, RunManifest& m) {
  const double w = 0.05, c = 1.0, t2 = 3.0;
  const Grid1D g = o.grid || !o.domain.empty() ? grid_1d(o, -3.5, 3.5, 1401) : acoustics_grid();
  const PwcFunction1D p1 = acoustics_pressure(0.0, w, c, g, Sampling::CellCenter);
  const PwcFunction1D p2 = acoustics_pressure(t2, w, c, g, Sampling::CellCenter);
  std::vector<PwcFunction1D> results;
  Json table = Json::array();
  double worst = 0.0;
  for (std::size_t n = 0; n <= 10; ++n) {
    const double t = 0.2 * static_cast<double>(n);
    const PwcFunction1D r = interp_derivative_split(p1, p2, t / t2);
    check_finite(r.values(), "pressure");
    const PwcFunction1D exact = acoustics_pressure(t, w, c, g, Sampling::CellCenter);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < g.cells(); ++j) {
      num += std::abs(r.value(j) - exact.value(j)) * g.width(j);
      den += std::abs(exact.value(j)) * g.width(j);
    }
    worst = std::max(worst, num / den);
    write_density(out.path(indexed("pressure", n)), r);
    table.push_back(Json{{"t", t}, {"relative_l1_error", num / den}});
    results.push_back(r);
  }
  m.scenario = {"acoustics", {{"w", w}, {"c", c}, {"t1", 0.0}, {"t2", t2}}, "pressure hat splitting into two waves"};
  m.results["profiles"] = table;
  m.results["max_relative_l1_error"] = worst;
  if (o.plot) {
    std::vector<Curve> cs;
    for (std::size_t i = 0; i < results.size(); ++i) cs.push_back({indexed("t", i, ""), &results[i]});
    write_svg(out.path("acoustics.svg"), cs, "pressure at t = 0.2 n");
  }
}

void run_burgers(const Options& o, Outputs& out, RunManifest& m) {
  const ScenarioSpec ic = burgers_hat_ic();
  const Grid1D g = grid_1d(o, ic.get("domain_left"), ic.get("domain_right"));
  const double t1 = ic.get("t1"), t2 = ic.get("t2");
  const PwcFunction1D u1 = burgers_solution(t1, ic, g);
  const PwcFunction1D u2 = burgers_solution(t2, ic, g);
  std::vector<PwcFunction1D> results;
  Json table = Json::array();
  for (std::size_t n = 1; n <= 10; ++n) {
    const double t = t1 + 0.2 * static_cast<double>(n);
    const double l = (t - t1) / (t2 - t1);
    const PwcFunction1D r = on_grid(interp_nonneg(u1, u2, l), g);
    check_nonneg(r, "interpolant");
    const PwcFunction1D exact = burgers_solution(t, ic, g);
    double err = 0.0;
    for (std::size_t j = 0; j < g.cells(); ++j) err += std::abs(r.value(j) - exact.value(j)) * g.width(j);
    write_density(out.path(indexed("burgers", n)), r);
    table.push_back(Json{{"t", t}, {"lambda", l}, {"l1_error_vs_exact", err}, {"exact_shock", burgers_shock_position(t, ic)}});
    results.push_back(r);
  }
  m.scenario = ic;
  m.results["profiles"] = table;
  if (o.plot) {
    std::vector<Curve> cs;
    for (std::size_t i = 0; i < results.size(); ++i) cs.push_back({indexed("t", i + 1, ""), &results[i]});
    write_svg(out.path("burgers.svg"), cs, "Burgers interpolants");
  }
}

void run_radon2d(const Options& o, Outputs& out, RunManifest& m) {
  const std::size_t dim = grid_2d(o);
  const auto [u1, u2] = diamond_gaussians(dim);
  const std::vector<double> lambdas = o.lambdas.empty() ? std::vector<double>{0.25, 0.5, 0.75} : o.lambdas;
  Json table = Json::array();
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const Dinterp2dResult r = dinterp2d(u1, u2, lambdas[i], geometry(o), o.tol, o.max_iter);
    check_finite(r.image.values(), "interpolant");
    write_image(out.path(indexed("radon2d", i)), r.image, "lambda=" + format_double(lambdas[i]));
    out.path(indexed("radon2d", i) + ".json");
    table.push_back(Json{{"lambda", lambdas[i]},
                         {"iterations", r.inversion.iterations},
                         {"residual", r.inversion.residual},
                         {"converged", r.inversion.converged},
                         {"mass", r.image.mass()}});
  }
  m.scenario = {"diamond-gaussians", {{"D", static_cast<double>(dim)}}, "diamond hump and shifted round hump"};
  m.geometry = geometry_json(o, dim);
  m.tolerances = tolerance_json(o);
  m.results["interpolants"] = table;
}

void run_osc2d(const Options& o, Outputs& out, RunManifest& m) {
  const std::size_t dim = grid_2d(o);
  const double sigma2 = 0.0125, k1 = 8.0, k2 = 16.0;
  const RadonGeometry geo = geometry(o);
  TransformChain chain;
  chain.fourier_permute().radon(geo, o.tol, o.max_iter);
  const std::vector<double> lambdas = o.lambdas.empty() ? std::vector<double>{0.75} : o.lambdas;
  const Image2D u1 = oscillatory(k1, sigma2, dim), u2 = oscillatory(k2, sigma2, dim);
  Json table = Json::array();
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const Image2D r = std::get<Image2D>(interp_via_transform(chain, Field(u1), Field(u2), lambdas[i]));
    check_finite(r.values(), "interpolant");
    write_image(out.path(indexed("osc2d", i)), r, "lambda=" + format_double(lambdas[i]));
    out.path(indexed("osc2d", i) + ".json");
    table.push_back(Json{{"lambda", lambdas[i]}, {"norm", r.norm()}});
  }
  m.results["interpolants"] = table;
  if (o.report_singvals) {
    std::vector<Image2D> family;
    for (std::size_t j = 0; j < o.members; ++j) family.push_back(oscillatory(8.0 + 0.5 * static_cast<double>(j), sigma2, dim));
    const std::size_t q = o.levels ? o.levels : 64;
    const TransportSvdStudy study = transport_svd_study(family, chain, q);
    write_singular_stats(out.path("singvals.csv"), study.stats);
    write_singular_values(out.path("raw_singvals.csv"), study.raw_singular_values);
    const auto& mean = study.stats.means;
    const auto& raw = study.raw_singular_values;
    m.results["angles_used"] = study.angles_used.size();
    if (mean.size() > 4 && raw.size() > 4) {
      m.results["mean_s5_over_s1"] = mean[4] / mean[0];
      m.results["raw_s5_over_s1"] = raw[4] / raw[0];
    }
  }
  m.scenario = {"oscillatory",
                {{"D", static_cast<double>(dim)}, {"sigma2", sigma2}, {"k1", k1}, {"k2", k2},
                 {"members", static_cast<double>(o.report_singvals ? o.members : 0)}},
                "radial Gaussian-windowed cosines; chain " + chain.describe()};
  m.geometry = geometry_json(o, dim);
  m.tolerances = tolerance_json(o);
}

// Arguments recorded in the manifest: everything except the output directory
// and the worker count, neither of which affects the results.
std::vector<std::string> recorded_arguments(const std::vector<std::string>& args) {
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--out-dir" || a == "--threads") {
      ++i;
      continue;
    }
    if (a.rfind("--out-dir=", 0) == 0 || a.rfind("--threads=", 0) == 0) continue;
    kept.push_back(a);
  }
  return kept;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--grid", o.grid, "Cells per axis (1D default 1000, 2D default 128 or 64 with --quick)");
  sub->add_option("--domain", o.domain, "1D domain as a,b");
  sub->add_option("--lambda", o.lambdas, "Interpolation parameters")->delimiter(',');
  sub->add_option("--weights", o.weights, "Convex weights")->delimiter(',');
  sub->add_option("--angles", o.angles, "Projection angles (0 selects 4 D)");
  sub->add_option("--oversample", o.oversample, "Radon bins per pixel width")->check(CLI::PositiveNumber);
  sub->add_option("--tol", o.tol, "Radon inversion tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--max-iter", o.max_iter, "Radon inversion iteration cap (0 selects 10 D)");
  sub->add_option("--seed", o.seed, "Random seed");
  sub->add_option("--threads", o.threads, "Worker threads (0 selects all cores)");
  sub->add_option("--out-dir", o.out_dir, "Output directory");
  sub->add_flag("--quick", o.quick, "Reduced 2D resolution");
  sub->add_flag("--plot", o.plot, "Also write SVG line plots");
}

struct Command {
  const char* name;
  const char* help;
  Runner run;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> list = {
      {"pair", "Interpolate two 1D functions", run_pair},
      {"bary", "Barycentric interpolation of several 1D functions", run_bary},
      {"hats", "Random-hat family and its transport-mode SVD", run_hats},
      {"two-param", "Two-parameter family at twelve query points", run_two_param},
      {"wavelet", "Dilation and translation sweeps of a wavelet", run_wavelet},
      {"acoustics", "Pressure profiles of the acoustics equations at t = 0.2 n", run_acoustics},
      {"burgers", "Burgers profiles at t = 1 + 0.2 n", run_burgers},
      {"radon2d", "2D interpolation of two Gaussian humps", run_radon2d},
      {"osc2d", "Oscillatory 2D interpolation through the Fourier-Radon chain", run_osc2d},
  };
  return list;
}

int run(const std::vector<std::string>& args, std::optional<std::string> out_override = std::nullopt);

int dispatch(const std::string& name, const Options& o, const std::vector<std::string>& sub_args) {
  const auto& cmds = commands();
  const auto it = std::find_if(cmds.begin(), cmds.end(), [&](const Command& c) { return name == c.name; });
  set_thread_count(o.threads);
  const auto start = std::chrono::steady_clock::now();
  Outputs out(o.out_dir);
  RunManifest m;
  m.tool_version = kToolVersion;
  m.subcommand = name;
  m.arguments = recorded_arguments(sub_args);
  m.seed = o.seed;
  it->run(o, out, m);
  m.outputs = out.names();
  m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  m.threads = thread_count();
  write_manifest(out.dir() / "manifest.json", m);
  return 0;
}

int run(const std::vector<std::string>& args, std::optional<std::string> out_override) {
  CLI::App app{"Displacement interpolation experiments"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  Options o;
  for (const auto& c : commands()) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, o);
    const std::string n = c.name;
    if (n == "pair") {
      sub->add_option("--input1", o.input1, "First density CSV");
      sub->add_option("--input2", o.input2, "Second density CSV");
      sub->add_flag("--signed", o.is_signed, "Use the signed interpolant");
    } else if (n == "bary") {
      sub->add_option("--inputs", o.inputs, "Density CSVs")->delimiter(',');
      sub->add_option("--alpha", o.alpha, "Query parameter")->delimiter(',');
      sub->add_option("--nodes", o.nodes, "Member parameters as x,y;x,y;...");
    } else if (n == "hats") {
      sub->add_option("--members", o.members, "Family size")->check(CLI::Range(2, 100000));
      sub->add_option("--levels", o.levels, "Quantile sample levels (default 512)");
    } else if (n == "osc2d") {
      sub->add_flag("--report-singvals", o.report_singvals, "Transport-map singular values over the k-family");
      sub->add_option("--members", o.members, "Family size")->check(CLI::Range(2, 100000));
      sub->add_option("--levels", o.levels, "Quantile sample levels (default 64)");
    }
  }
  CLI::App* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("manifest", o.manifest, "manifest.json of an earlier run")->required();
  replay->add_option("--out-dir", o.out_dir, "Output directory")->required();
  replay->add_option("--threads", o.threads, "Worker threads");

  std::vector<const char*> argv{"dinterp"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (out_override) o.out_dir = *out_override;

  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  if (name == "replay") {
    const RunManifest m = read_manifest(o.manifest);
    std::vector<std::string> again{m.subcommand};
    again.insert(again.end(), m.arguments.begin(), m.arguments.end());
    again.push_back("--threads");
    again.push_back(std::to_string(o.threads));
    return run(again, o.out_dir);
  }
  const auto at = std::find(args.begin(), args.end(), name);
  std::vector<std::string> sub_args(at == args.end() ? at : at + 1, args.end());
  return dispatch(name, o, sub_args);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
