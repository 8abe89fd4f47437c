#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dinterp/error.hpp"
#include "dinterp/io.hpp"
#include "dinterp/scenarios.hpp"

using namespace dinterp;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dinterp_io_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("doubles round trip bit for bit") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("density round trip and parse errors") {
  const PwcFunction1D u = hat(0.1, 0.37, Grid1D::uniform(0, 1, 17));
  std::stringstream s;
  write_density(s, u);
  CHECK(read_density(s) == u);

  std::stringstream bad("x_left,x_right,value\n0,1,abc\n");
  try {
    read_density(bad, "mem");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("mem:2") != std::string::npos);
  }
  std::stringstream missing("x_left,value\n0,1\n");
  CHECK(code_of([&] { read_density(missing); }) == ErrorCode::ParseError);
  std::stringstream gap("x_left,x_right,value\n0,1,1\n1.5,2,1\n");
  CHECK(code_of([&] { read_density(gap); }) == ErrorCode::InvariantViolation);
}

TEST_CASE("quantile and CDF round trips") {
  const PwcFunction1D u(Grid1D::uniform(0, 1, 4), {1, 0, 0, 3});
  const PwlCdf c = cdf(u);
  const QuantileCurve q = pseudo_inverse(c);
  std::stringstream a, b;
  write_cdf(a, c);
  write_quantile(b, q);
  CHECK(read_cdf(a) == c);
  CHECK(read_quantile(b) == q);
  std::stringstream dec("x,U,F\n0,0,0\n1,2,1\n2,1,1\n");
  CHECK(code_of([&] { read_cdf(dec); }) == ErrorCode::InvariantViolation);
}

TEST_CASE("image, sinogram and mode basis files") {
  const fs::path dir = scratch("files");
  const Image2D u = oscillatory(8, 0.0125, 8);
  write_image(dir / "u.csv", u, "test");
  CHECK(read_image(dir / "u.csv") == u);
  const Sinogram g = radon_forward(u, {6, 2.0});
  write_sinogram(dir / "g.csv", g);
  CHECK(read_sinogram(dir / "g.csv") == g);

  const Grid1D grid = Grid1D::uniform(0, 1, 200);
  std::vector<QuantileCurve> curves;
  for (const auto& h : random_hats(5, 1, grid)) curves.push_back(pseudo_inverse(cdf(h)));
  const ModeBasis b = svd(build_snapshots(curves, interior_levels(16)));
  write_mode_basis(dir / "m.csv", b);
  const ModeBasis r = read_mode_basis(dir / "m.csv");
  CHECK(r.modes == b.modes);
  CHECK(r.singular_values == b.singular_values);
  CHECK(r.reference == b.reference);

  const SingularStats st{{1.0, 0.5}, {0.0, 0.25}};
  write_singular_stats(dir / "s.csv", st);
  const SingularStats st2 = read_singular_stats(dir / "s.csv");
  CHECK(st2.means == st.means);
  CHECK(st2.stds == st.stds);
  CHECK(code_of([&] { read_image(dir / "absent.csv"); }) == ErrorCode::ParseError);
}

TEST_CASE("bundle round trip") {
  const fs::path dir = scratch("bundle");
  TransformChain chain;
  chain.fourier_permute();
  const ComponentBundle b = apply_chain(chain, Field(oscillatory(8, 0.0125, 8)));
  write_bundle(dir, b, chain.describe());
  const ComponentBundle r = read_bundle(dir);
  REQUIRE(r.names() == b.names());
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(std::get<Image2D>(r[i].field) == std::get<Image2D>(b[i].field));
}

TEST_CASE("manifest round trip") {
  RunManifest m;
  m.tool_version = "1";
  m.subcommand = "pair";
  m.arguments = {"--lambda", "0.5"};
  m.scenario = burgers_hat_ic();
  m.results["x"] = 1.5;
  m.outputs = {"a.csv"};
  m.seed = 7;
  m.wall_clock_seconds = 0.25;
  m.threads = 3;
  const Json j = to_json(m);
  CHECK(j["schema_version"] == kManifestSchema);
  const RunManifest r = manifest_from_json(j);
  CHECK(to_json(r) == j);
  CHECK(r.scenario.get("amplitude") == 0.2);
}
