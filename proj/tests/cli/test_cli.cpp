#include <cstdlib>
#include <filesystem>

#include "cli.hpp"
#include "qsweld/io.hpp"
#include "support.hpp"

using namespace qsweld;
using cli::Json;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "qsweld");
  args.push_back("--quiet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

Json manifest(const std::string& dir) { return Json::parse(read_file(dir + "/manifest.json")); }

std::string without_timestamp(const std::string& dir) {
  Json m = manifest(dir);
  m.erase("timestamp");
  return m.dump();
}

std::string config_dir() {
  const char* d = std::getenv("QSWELD_CONFIG_DIR");
  return d ? d : "configs";
}

}  // namespace

TEST_CASE("weld with the identity") {
  const std::string out = test::scratch_dir("cli_weld_id");
  CHECK(run({"weld", "--set", "inputs.h.kind=identity", "--set", "inputs.h.samples=256", "--output", out}) == 0);
  const Json m = manifest(out);
  CHECK(m["pass"].get<bool>());
  CHECK(m["results"]["residual"].get<double>() < 1e-6);
  CHECK(m["config"]["grid"]["N"] == 256);
  for (const char* f : {"F.qwgr", "G.qwgr", "seam.csv"}) CHECK(fs::exists(fs::path(out) / f));
  CHECK(load_plane_map(out + "/F.qwgr").grid.n == 256);
  CHECK(read_polyline_csv(out + "/seam.csv").size() == 1024);
}

TEST_CASE("sew reports the additive modulus") {
  const std::string out = test::scratch_dir("cli_sew");
  CHECK(run({"sew", "--output", out}) == 0);
  const Json m = manifest(out);
  CHECK(m["results"]["modulus_error"].get<double>() < 1e-3);
  CHECK(m["results"]["modulus"].get<double>() == doctest::Approx(std::log(4.0) / kTwoPi).epsilon(1e-3));
  CHECK(fs::exists(fs::path(out) / "boundary_000.csv"));
}

TEST_CASE("exit codes") {
  const std::string out = test::scratch_dir("cli_codes");
  const std::string cfg = out + "/missing_rigging.json";
  write_file(cfg, R"({"command": "sew", "inputs": {"x": {"annulus": {"r_inner": 0.5, "r_outer": 1.0,
      "inner": "out", "outer": "out"}, "riggings_override": {"1": "no_such_rigging.json"}}}})");
  CHECK(run({"--config", cfg, "--output", out + "/a"}) == 2);
  CHECK(run({"frobnicate"}) == 2);
  CHECK(run({"weld", "--set", "grid.N=100", "--output", out + "/b"}) == 2);
  CHECK(run({"weld", "--set", "inputs.h.amplitude=1.5", "--output", out + "/c"}) == 2);
  CHECK(run({"modulus", "--config", out + "/nope.json"}) == 2);
  CHECK(run({"weld", "--config", cfg}) == 2);  // command conflict
  // Tolerance failure still writes the manifest.
  CHECK(run({"weld", "--set", "tolerances.residual=1e-12", "--set", "grid.N=64", "--output", out + "/d"}) == 1);
  const Json m = manifest(out + "/d");
  CHECK_FALSE(m["pass"].get<bool>());
  CHECK_FALSE(m["checks"][0]["pass"].get<bool>());
  // Solver-side failure: a map too degenerate to embed; the manifest carries the diagnostic.
  CHECK(run({"motion", "--set", "inputs.map.k=0.95", "--set", "grid.N=64", "--output", out + "/e"}) == 3);
  const Json e = manifest(out + "/e");
  CHECK_FALSE(e["pass"].get<bool>());
  CHECK(e["error"]["code"].get<std::string>().size() > 0);
  CHECK(e["error"]["message"].get<std::string>().size() > 0);
}

TEST_CASE("manifests are deterministic modulo the timestamp") {
  const std::string a = test::scratch_dir("cli_det_a"), b = test::scratch_dir("cli_det_b");
  CHECK(run({"weld", "--set", "grid.N=128", "--output", a}) == 0);
  CHECK(run({"weld", "--set", "grid.N=128", "--output", b}) == 0);
  Json ma = manifest(a), mb = manifest(b);
  ma["config"].erase("output_dir");
  mb["config"].erase("output_dir");
  ma.erase("timestamp");
  mb.erase("timestamp");
  CHECK(ma.dump() == mb.dump());
  CHECK(read_file(a + "/seam.csv") == read_file(b + "/seam.csv"));
  CHECK(read_file(a + "/F.qwgr") == read_file(b + "/F.qwgr"));
  CHECK(manifest(a)["timestamp"].contains("wall_time_s"));
}

TEST_CASE("overrides") {
  Json c = cli::default_config("qs");
  cli::apply_override(c, "inputs.density=512");
  cli::apply_override(c, "inputs.line=affine");
  cli::apply_override(c, "new.nested.key=[1, 2]");
  CHECK(c["inputs"]["density"] == 512);
  CHECK(c["inputs"]["line"] == "affine");
  CHECK(c["new"]["nested"]["key"].size() == 2);
  CHECK_THROWS(cli::apply_override(c, "no_equals_sign"));
  for (const auto& cmd : cli::commands()) CHECK(cli::default_config(cmd)["command"] == cmd);
}

TEST_CASE("qs and modulus commands") {
  const std::string out = test::scratch_dir("cli_qs");
  CHECK(run({"qs", "--output", out + "/q"}) == 0);
  CHECK(manifest(out + "/q")["results"]["k_estimate"].get<double>() ==
        doctest::Approx(7 + 4 * std::sqrt(3.0)).epsilon(0.02));
  write_polyline_csv(out + "/in.csv", [] {
    std::vector<Complex> p;
    for (int s = 0; s < 256; ++s) p.push_back(std::polar(0.25, kTwoPi * s / 256));
    return p;
  }());
  const std::string cfg = out + "/mod.json";
  write_file(cfg, R"({"command": "modulus", "inputs": {"inner": "in.csv", "expected": 0.22063560015961912,
      "mobius": [[1, 0], [0.2, 0], [0.3, 0], [1, 0]]}})");
  CHECK(run({"--config", cfg, "--output", out + "/m"}) == 0);
  CHECK(manifest(out + "/m")["results"]["relative_error"].get<double>() < 1e-8);
}

TEST_CASE("family bundle feeds holotest") {
  const std::string out = test::scratch_dir("cli_family");
  const std::string cfg = out + "/fam.json";
  write_file(cfg, R"({"command": "family", "grid": {"L": 2.0, "N": 128},
    "inputs": {"kind": "marking", "surface": {"circle_domain": {"outer": {"c": [0, 0], "r": 1},
      "holes": [{"c": [0, 0.5], "r": 0.12}, {"c": [-0.43, -0.25], "r": 0.12}, {"c": [0.43, -0.25], "r": 0.12}]}},
      "nu": {"kind": "bump", "center": [0.1, -0.1], "radius": 0.3, "amplitude": [0.5, 0]},
      "stencil": {"center": [0, 0], "radius": 0.5}, "write_grids": false}})");
  CHECK(run({"--config", cfg, "--output", out + "/f"}) == 0);
  const Json fm = manifest(out + "/f");
  CHECK(fm["results"]["outputs"].size() == 17);
  CHECK(fm["results"]["holotest"]["cr"].get<double>() < 1e-3);
  CHECK(run({"holotest", "--set", "inputs.manifest=" + out + "/f/family.json", "--output", out + "/h"}) == 0);
  const Json v = Json::parse(read_file(out + "/h/verdict.json"));
  CHECK(v["cr"].get<double>() == doctest::Approx(fm["results"]["holotest"]["cr"].get<double>()));
  // The conjugate family is flagged.
  CHECK(run({"--config", cfg, "--set", "inputs.conjugate=true", "--output", out + "/g"}) == 1);
  CHECK(run({"--config", cfg, "--set", "inputs.conjugate=true", "--set", "inputs.expect_fail=true",
             "--output", out + "/g2"}) == 0);
}

TEST_CASE("shipped configs parse and validate") {
  REQUIRE(fs::exists(config_dir()));
  int seen = 0;
  for (const auto& e : fs::directory_iterator(config_dir())) {
    if (e.path().extension() != ".json") continue;
    const Json c = Json::parse(read_file(e.path().string()));
    CHECK_MESSAGE(c.contains("command"), e.path().string());
    const auto& cmds = cli::commands();
    CHECK(std::find(cmds.begin(), cmds.end(), c["command"].get<std::string>()) != cmds.end());
    ++seen;
  }
  CHECK(seen >= 6);
}
