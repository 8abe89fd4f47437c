#pragma once

// Text serialization of every domain type. Numbers are written with 17
// significant digits so that reading a file back reproduces each double
// bit for bit. Companion JSON files carry shape metadata.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dinterp/grid1d.hpp"
#include "dinterp/lowrank.hpp"
#include "dinterp/radon.hpp"
#include "dinterp/scenarios.hpp"
#include "dinterp/transform.hpp"

namespace dinterp {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string format_double(double x);

// Densities: header x_left,x_right,value; one row per cell.
void write_density(std::ostream& out, const PwcFunction1D& u);
PwcFunction1D read_density(std::istream& in, const std::string& source = "<stream>");
void write_density(const fs::path& path, const PwcFunction1D& u);
PwcFunction1D read_density(const fs::path& path);

// Quantile curves: header y,x; a repeated y encodes a jump.
void write_quantile(std::ostream& out, const QuantileCurve& q);
QuantileCurve read_quantile(std::istream& in, const std::string& source = "<stream>");
void write_quantile(const fs::path& path, const QuantileCurve& q);
QuantileCurve read_quantile(const fs::path& path);

// CDFs: header x,U,F with U = F * total mass; the total mass is the last U.
void write_cdf(std::ostream& out, const PwlCdf& c);
PwlCdf read_cdf(std::istream& in, const std::string& source = "<stream>");
void write_cdf(const fs::path& path, const PwlCdf& c);
PwlCdf read_cdf(const fs::path& path);

// Images: D rows of D comma-separated values, row index along y, plus a
// sidecar <path>.json holding {D, extent, description}.
void write_image(const fs::path& path, const Image2D& u, const std::string& description = "");
Image2D read_image(const fs::path& path);

// Sinograms: header angle_index,omega_x,omega_y,s,value with s absolute, plus
// a sidecar <path>.json holding the geometry.
void write_sinogram(const fs::path& path, const Sinogram& g);
Sinogram read_sinogram(const fs::path& path);

// Mode bases: header y,mode_1,...,mode_K plus a sidecar <path>.json with the
// singular values and the reference curve.
void write_mode_basis(const fs::path& path, const ModeBasis& b);
ModeBasis read_mode_basis(const fs::path& path);

// Singular-value tables: j,value (1-based j) and j,mean,std.
void write_singular_values(const fs::path& path, const std::vector<double>& s);
void write_singular_stats(const fs::path& path, const SingularStats& stats);
SingularStats read_singular_stats(const fs::path& path);

// Bundles: a directory with one file per component and manifest.json naming
// components, their kinds and the chain description.
void write_bundle(const fs::path& dir, const ComponentBundle& b, const std::string& chain_description);
ComponentBundle read_bundle(const fs::path& dir);

Json to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const Json& j);

inline constexpr int kManifestSchema = 1;

struct RunManifest {
  std::string tool_version;
  std::string subcommand;
  std::vector<std::string> arguments;  // argv after the program name, without --out-dir
  ScenarioSpec scenario;
  Json geometry = Json::object();
  Json tolerances = Json::object();
  Json results = Json::object();
  std::vector<std::string> outputs;
  std::optional<std::uint64_t> seed;
  // Runtime facts excluded from reproducibility comparisons.
  double wall_clock_seconds = 0.0;
  std::size_t threads = 1;
};

Json to_json(const RunManifest& m);
RunManifest manifest_from_json(const Json& j);
void write_manifest(const fs::path& path, const RunManifest& m);
RunManifest read_manifest(const fs::path& path);

}  // namespace dinterp
