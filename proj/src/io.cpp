#include "dinterp/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dinterp/error.hpp"

namespace dinterp {

std::string format_double(double x) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf, static_cast<std::size_t>(n));
}

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::InvalidArgument, "cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot open '" + path.string() + "'");
  return in;
}

fs::path sidecar(const fs::path& path) { return fs::path(path.string() + ".json"); }

void write_json(const fs::path& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

Json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

template <class T>
T json_get(const Json& j, const char* key, const std::string& source) {
  if (!j.contains(key)) fail(ErrorCode::ParseError, source + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, source + ": key '" + key + "': " + e.what());
  }
}

// Re-raises construction failures of loaded data as invariant violations.
template <class Fn>
auto validated(const std::string& source, Fn fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    fail(ErrorCode::InvariantViolation, source + ": " + e.detail());
  }
}

class CsvReader {
 public:
  CsvReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  // Reads the header and returns, for each expected column, its position.
  void expect_header(const std::vector<std::string>& expected) {
    if (!next_line()) fail(ErrorCode::ParseError, where(1) + "empty file, expected header");
    split();
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i >= fields_.size() || fields_[i].text != expected[i]) {
        fail(ErrorCode::ParseError, where(i < fields_.size() ? fields_[i].column : line_.size() + 1) +
                                        "missing column '" + expected[i] + "' in header");
      }
    }
    if (fields_.size() != expected.size()) {
      fail(ErrorCode::ParseError, where(fields_[expected.size()].column) + "unexpected column '" +
                                      fields_[expected.size()].text + "'");
    }
  }

  // Reads the next nonempty row; returns false at end of input.
  bool row() {
    while (next_line()) {
      if (line_.find_first_not_of(" \t\r") == std::string::npos) continue;
      split();
      return true;
    }
    return false;
  }

  std::size_t size() const { return fields_.size(); }

  void expect_size(std::size_t n) const {
    if (fields_.size() != n) {
      fail(ErrorCode::ParseError, where(1) + "expected " + std::to_string(n) + " fields, found " +
                                      std::to_string(fields_.size()));
    }
  }

  double number(std::size_t i) const {
    const Field& f = fields_[i];
    double v = 0.0;
    const char* first = f.text.data();
    const char* last = first + f.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || f.text.empty()) {
      fail(ErrorCode::ParseError, where(f.column) + "expected a number, found '" + f.text + "'");
    }
    return v;
  }

  std::size_t integer(std::size_t i) const {
    const Field& f = fields_[i];
    std::size_t v = 0;
    const char* first = f.text.data();
    const char* last = first + f.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || f.text.empty()) {
      fail(ErrorCode::ParseError, where(f.column) + "expected an integer, found '" + f.text + "'");
    }
    return v;
  }

  std::string where(std::size_t column) const {
    return source_ + ":" + std::to_string(line_no_) + ":" + std::to_string(column) + ": ";
  }
  const std::string& source() const { return source_; }

 private:
  struct Field {
    std::string text;
    std::size_t column;  // 1-based
  };

  bool next_line() {
    if (!std::getline(in_, line_)) return false;
    ++line_no_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    return true;
  }

  void split() {
    fields_.clear();
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line_.find(',', start);
      const std::size_t end = comma == std::string::npos ? line_.size() : comma;
      std::string text = line_.substr(start, end - start);
      const auto b = text.find_first_not_of(" \t");
      const auto e = text.find_last_not_of(" \t");
      fields_.push_back({b == std::string::npos ? std::string() : text.substr(b, e - b + 1), start + 1});
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }

  std::istream& in_;
  std::string source_;
  std::string line_;
  std::size_t line_no_ = 0;
  std::vector<Field> fields_;
};

Json extent_json(const Extent& e) { return Json::array({e.x0, e.x1, e.y0, e.y1}); }

Extent extent_from(const Json& j, const std::string& source) {
  const auto v = json_get<std::vector<double>>(j, "extent", source);
  if (v.size() != 4) fail(ErrorCode::ParseError, source + ": extent needs four numbers");
  return Extent{v[0], v[1], v[2], v[3]};
}

}  // namespace

// ---------------------------------------------------------------- densities

void write_density(std::ostream& out, const PwcFunction1D& u) {
  out << "x_left,x_right,value\n";
  const auto e = u.grid().edges();
  for (std::size_t j = 0; j < u.cells(); ++j) {
    out << format_double(e[j]) << ',' << format_double(e[j + 1]) << ',' << format_double(u.value(j)) << '\n';
  }
}

PwcFunction1D read_density(std::istream& in, const std::string& source) {
  CsvReader csv(in, source);
  csv.expect_header({"x_left", "x_right", "value"});
  std::vector<double> edges, values;
  while (csv.row()) {
    csv.expect_size(3);
    const double left = csv.number(0), right = csv.number(1);
    if (edges.empty()) {
      edges.push_back(left);
    } else if (left != edges.back()) {
      fail(ErrorCode::InvariantViolation, csv.where(1) + "cell does not start where the previous one ended");
    }
    edges.push_back(right);
    values.push_back(csv.number(2));
  }
  if (values.empty()) fail(ErrorCode::ParseError, source + ": no cells");
  return validated(source, [&] { return PwcFunction1D(Grid1D(std::move(edges)), std::move(values)); });
}

void write_density(const fs::path& path, const PwcFunction1D& u) {
  auto out = open_out(path);
  write_density(out, u);
}

PwcFunction1D read_density(const fs::path& path) {
  auto in = open_in(path);
  return read_density(in, path.string());
}

// ---------------------------------------------------------------- quantiles

void write_quantile(std::ostream& out, const QuantileCurve& q) {
  out << "y,x\n";
  for (std::size_t i = 0; i < q.size(); ++i) out << format_double(q.ys()[i]) << ',' << format_double(q.xs()[i]) << '\n';
}

QuantileCurve read_quantile(std::istream& in, const std::string& source) {
  CsvReader csv(in, source);
  csv.expect_header({"y", "x"});
  std::vector<double> ys, xs;
  while (csv.row()) {
    csv.expect_size(2);
    ys.push_back(csv.number(0));
    xs.push_back(csv.number(1));
  }
  return validated(source, [&] { return QuantileCurve(std::move(ys), std::move(xs)); });
}

void write_quantile(const fs::path& path, const QuantileCurve& q) {
  auto out = open_out(path);
  write_quantile(out, q);
}

QuantileCurve read_quantile(const fs::path& path) {
  auto in = open_in(path);
  return read_quantile(in, path.string());
}

// ---------------------------------------------------------------- CDFs

void write_cdf(std::ostream& out, const PwlCdf& c) {
  out << "x,U,F\n";
  for (std::size_t j = 0; j < c.size(); ++j) {
    out << format_double(c.x(j)) << ',' << format_double(c.value(j)) << ',' << format_double(c.fraction(j)) << '\n';
  }
}

PwlCdf read_cdf(std::istream& in, const std::string& source) {
  CsvReader csv(in, source);
  csv.expect_header({"x", "U", "F"});
  std::vector<double> xs, us, fs;
  while (csv.row()) {
    csv.expect_size(3);
    xs.push_back(csv.number(0));
    us.push_back(csv.number(1));
    fs.push_back(csv.number(2));
    if (us.size() > 1 && us.back() < us[us.size() - 2]) {
      fail(ErrorCode::InvariantViolation, csv.where(1) + "cumulative mass U decreases");
    }
  }
  if (us.size() < 2) fail(ErrorCode::ParseError, source + ": a CDF needs at least two nodes");
  const double mass = us.back();
  for (std::size_t j = 0; j < us.size(); ++j) {
    if (std::abs(us[j] - fs[j] * mass) > 1e-12 * std::abs(mass)) {
      fail(ErrorCode::InvariantViolation, source + ": node " + std::to_string(j) + " has U inconsistent with F");
    }
  }
  return validated(source, [&] { return PwlCdf(std::move(xs), std::move(fs), mass); });
}

void write_cdf(const fs::path& path, const PwlCdf& c) {
  auto out = open_out(path);
  write_cdf(out, c);
}

PwlCdf read_cdf(const fs::path& path) {
  auto in = open_in(path);
  return read_cdf(in, path.string());
}

// ---------------------------------------------------------------- images

void write_image(const fs::path& path, const Image2D& u, const std::string& description) {
  {
    auto out = open_out(path);
    const std::size_t d = u.dim();
    for (std::size_t iy = 0; iy < d; ++iy) {
      for (std::size_t ix = 0; ix < d; ++ix) {
        if (ix > 0) out << ',';
        out << format_double(u.at(iy, ix));
      }
      out << '\n';
    }
  }
  Json meta;
  meta["D"] = u.dim();
  meta["extent"] = extent_json(u.extent());
  meta["description"] = description;
  write_json(sidecar(path), meta);
}

Image2D read_image(const fs::path& path) {
  const std::string source = path.string();
  const Json meta = read_json(sidecar(path));
  const auto d = json_get<std::size_t>(meta, "D", sidecar(path).string());
  const Extent extent = extent_from(meta, sidecar(path).string());
  auto in = open_in(path);
  CsvReader csv(in, source);
  std::vector<double> values;
  values.reserve(d * d);
  std::size_t rows = 0;
  while (csv.row()) {
    csv.expect_size(d);
    for (std::size_t i = 0; i < d; ++i) values.push_back(csv.number(i));
    ++rows;
  }
  if (rows != d) fail(ErrorCode::ParseError, source + ": expected " + std::to_string(d) + " rows, found " +
                                                 std::to_string(rows));
  return validated(source, [&] { return Image2D(d, extent, std::move(values)); });
}

// ---------------------------------------------------------------- sinograms

void write_sinogram(const fs::path& path, const Sinogram& g) {
  {
    auto out = open_out(path);
    out << "angle_index,omega_x,omega_y,s,value\n";
    for (std::size_t p = 0; p < g.angles(); ++p) {
      const std::string ox = format_double(g.omega_x(p)), oy = format_double(g.omega_y(p));
      for (std::size_t k = 0; k < g.bins(); ++k) {
        out << p << ',' << ox << ',' << oy << ',' << format_double(g.s_absolute(p, k)) << ','
            << format_double(g.at(p, k)) << '\n';
      }
    }
  }
  Json meta;
  meta["D"] = g.image_dim();
  meta["extent"] = extent_json(g.image_extent());
  meta["angles"] = g.angles();
  meta["oversample"] = g.geometry().oversample;
  meta["bins"] = g.bins();
  write_json(sidecar(path), meta);
}

Sinogram read_sinogram(const fs::path& path) {
  const std::string source = path.string();
  const std::string meta_source = sidecar(path).string();
  const Json meta = read_json(sidecar(path));
  RadonGeometry geo{json_get<std::size_t>(meta, "angles", meta_source), json_get<double>(meta, "oversample", meta_source)};
  Sinogram g = validated(source, [&] {
    return Sinogram(json_get<std::size_t>(meta, "D", meta_source), extent_from(meta, meta_source), geo);
  });
  if (g.bins() != json_get<std::size_t>(meta, "bins", meta_source)) {
    fail(ErrorCode::InvariantViolation, meta_source + ": bin count does not match the geometry");
  }
  auto in = open_in(path);
  CsvReader csv(in, source);
  csv.expect_header({"angle_index", "omega_x", "omega_y", "s", "value"});
  std::size_t count = 0;
  while (csv.row()) {
    csv.expect_size(5);
    if (count >= g.angles() * g.bins()) fail(ErrorCode::ParseError, csv.where(1) + "more rows than the geometry holds");
    const std::size_t p = count / g.bins(), k = count % g.bins();
    if (csv.integer(0) != p) fail(ErrorCode::ParseError, csv.where(1) + "rows out of order");
    g.at(p, k) = csv.number(4);
    ++count;
  }
  if (count != g.angles() * g.bins()) fail(ErrorCode::ParseError, source + ": too few rows for the geometry");
  return g;
}

// ---------------------------------------------------------------- modes

void write_mode_basis(const fs::path& path, const ModeBasis& b) {
  {
    auto out = open_out(path);
    out << 'y';
    for (Eigen::Index k = 0; k < b.modes.cols(); ++k) out << ",mode_" << (k + 1);
    out << '\n';
    for (Eigen::Index q = 0; q < b.modes.rows(); ++q) {
      out << format_double(b.levels[static_cast<std::size_t>(q)]);
      for (Eigen::Index k = 0; k < b.modes.cols(); ++k) out << ',' << format_double(b.modes(q, k));
      out << '\n';
    }
  }
  Json meta;
  meta["singular_values"] = b.singular_values;
  meta["reference"] = {{"y", std::vector<double>(b.reference.ys().begin(), b.reference.ys().end())},
                       {"x", std::vector<double>(b.reference.xs().begin(), b.reference.xs().end())}};
  write_json(sidecar(path), meta);
}

ModeBasis read_mode_basis(const fs::path& path) {
  const std::string source = path.string();
  const std::string meta_source = sidecar(path).string();
  const Json meta = read_json(sidecar(path));
  auto sv = json_get<std::vector<double>>(meta, "singular_values", meta_source);
  if (!meta.contains("reference")) fail(ErrorCode::ParseError, meta_source + ": missing key 'reference'");
  auto ry = json_get<std::vector<double>>(meta["reference"], "y", meta_source);
  auto rx = json_get<std::vector<double>>(meta["reference"], "x", meta_source);
  QuantileCurve reference = validated(meta_source, [&] { return QuantileCurve(std::move(ry), std::move(rx)); });

  auto in = open_in(path);
  CsvReader csv(in, source);
  std::vector<std::string> header{"y"};
  for (std::size_t k = 0; k < sv.size(); ++k) header.push_back("mode_" + std::to_string(k + 1));
  csv.expect_header(header);
  std::vector<double> levels;
  std::vector<std::vector<double>> rows;
  while (csv.row()) {
    csv.expect_size(header.size());
    levels.push_back(csv.number(0));
    std::vector<double> r(sv.size());
    for (std::size_t k = 0; k < sv.size(); ++k) r[k] = csv.number(k + 1);
    rows.push_back(std::move(r));
  }
  Eigen::MatrixXd modes(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(sv.size()));
  for (std::size_t q = 0; q < rows.size(); ++q) {
    for (std::size_t k = 0; k < sv.size(); ++k) modes(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(k)) = rows[q][k];
  }
  for (std::size_t k = 1; k < sv.size(); ++k) {
    if (sv[k] > sv[k - 1]) fail(ErrorCode::InvariantViolation, meta_source + ": singular values are not sorted");
  }
  return ModeBasis{std::move(modes), std::move(sv), std::move(levels), std::move(reference)};
}

void write_singular_values(const fs::path& path, const std::vector<double>& s) {
  auto out = open_out(path);
  out << "j,value\n";
  for (std::size_t j = 0; j < s.size(); ++j) out << (j + 1) << ',' << format_double(s[j]) << '\n';
}

void write_singular_stats(const fs::path& path, const SingularStats& stats) {
  auto out = open_out(path);
  out << "j,mean,std\n";
  for (std::size_t j = 0; j < stats.means.size(); ++j) {
    out << (j + 1) << ',' << format_double(stats.means[j]) << ',' << format_double(stats.stds[j]) << '\n';
  }
}

SingularStats read_singular_stats(const fs::path& path) {
  auto in = open_in(path);
  CsvReader csv(in, path.string());
  csv.expect_header({"j", "mean", "std"});
  SingularStats s;
  while (csv.row()) {
    csv.expect_size(3);
    if (csv.integer(0) != s.means.size() + 1) fail(ErrorCode::ParseError, csv.where(1) + "rows out of order");
    s.means.push_back(csv.number(1));
    s.stds.push_back(csv.number(2));
  }
  return s;
}

// ---------------------------------------------------------------- bundles

void write_bundle(const fs::path& dir, const ComponentBundle& b, const std::string& chain_description) {
  fs::create_directories(dir);
  Json manifest;
  manifest["chain"] = chain_description;
  Json list = Json::array();
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Component& c = b[i];
    const std::string file = "component_" + std::to_string(i) + ".csv";
    if (const auto* u = std::get_if<PwcFunction1D>(&c.field)) {
      write_density(dir / file, *u);
    } else if (const auto* img = std::get_if<Image2D>(&c.field)) {
      write_image(dir / file, *img, c.name);
    } else {
      write_sinogram(dir / file, std::get<Sinogram>(c.field));
    }
    list.push_back({{"name", c.name}, {"kind", field_kind(c.field)}, {"file", file}});
  }
  manifest["components"] = list;
  write_json(dir / "manifest.json", manifest);
}

ComponentBundle read_bundle(const fs::path& dir) {
  const fs::path mpath = dir / "manifest.json";
  const Json manifest = read_json(mpath);
  if (!manifest.contains("components") || !manifest["components"].is_array()) {
    fail(ErrorCode::ParseError, mpath.string() + ": missing key 'components'");
  }
  ComponentBundle b;
  for (const auto& c : manifest["components"]) {
    const auto name = json_get<std::string>(c, "name", mpath.string());
    const auto kind = json_get<std::string>(c, "kind", mpath.string());
    const fs::path file = dir / json_get<std::string>(c, "file", mpath.string());
    if (kind == "function1d") {
      b.add(name, read_density(file));
    } else if (kind == "image2d") {
      b.add(name, read_image(file));
    } else if (kind == "sinogram") {
      b.add(name, read_sinogram(file));
    } else {
      fail(ErrorCode::ParseError, mpath.string() + ": unknown component kind '" + kind + "'");
    }
  }
  return b;
}

// ---------------------------------------------------------------- manifests

Json to_json(const ScenarioSpec& spec) {
  Json params = Json::object();
  for (const auto& [k, v] : spec.parameters) params[k] = v;
  return Json{{"name", spec.name}, {"parameters", params}, {"description", spec.description}};
}

ScenarioSpec scenario_from_json(const Json& j) {
  ScenarioSpec s;
  s.name = json_get<std::string>(j, "name", "scenario");
  s.description = j.value("description", std::string());
  if (j.contains("parameters")) {
    for (const auto& [k, v] : j["parameters"].items()) s.parameters[k] = v.get<double>();
  }
  return s;
}

Json to_json(const RunManifest& m) {
  Json j;
  j["schema_version"] = kManifestSchema;
  j["tool_version"] = m.tool_version;
  j["subcommand"] = m.subcommand;
  j["arguments"] = m.arguments;
  j["scenario"] = to_json(m.scenario);
  j["geometry"] = m.geometry;
  j["tolerances"] = m.tolerances;
  j["results"] = m.results;
  j["outputs"] = m.outputs;
  j["seed"] = m.seed ? Json(*m.seed) : Json(nullptr);
  j["runtime"] = {{"wall_clock_seconds", m.wall_clock_seconds}, {"threads", m.threads}};
  return j;
}

RunManifest manifest_from_json(const Json& j) {
  const std::string src = "manifest";
  const int schema = json_get<int>(j, "schema_version", src);
  if (schema != kManifestSchema) {
    fail(ErrorCode::ParseError, "manifest schema " + std::to_string(schema) + " is not supported");
  }
  RunManifest m;
  m.tool_version = json_get<std::string>(j, "tool_version", src);
  m.subcommand = json_get<std::string>(j, "subcommand", src);
  m.arguments = json_get<std::vector<std::string>>(j, "arguments", src);
  if (j.contains("scenario")) m.scenario = scenario_from_json(j["scenario"]);
  m.geometry = j.value("geometry", Json::object());
  m.tolerances = j.value("tolerances", Json::object());
  m.results = j.value("results", Json::object());
  m.outputs = j.value("outputs", std::vector<std::string>{});
  if (j.contains("seed") && !j["seed"].is_null()) m.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("runtime")) {
    m.wall_clock_seconds = j["runtime"].value("wall_clock_seconds", 0.0);
    m.threads = j["runtime"].value("threads", std::size_t{1});
  }
  return m;
}

void write_manifest(const fs::path& path, const RunManifest& m) { write_json(path, to_json(m)); }

RunManifest read_manifest(const fs::path& path) {
  const Json j = read_json(path);
  try {
    return manifest_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

}  // namespace dinterp
