#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "qsweld/holotest.hpp"
#include "qsweld/io.hpp"
#include "support.hpp"

using namespace qsweld;

TEST_CASE("stencil layout") {
  const Stencil st = Stencil::standard({0.1, 0.2}, 0.5);
  const auto pts = st.points();
  REQUIRE(pts.size() == 17);
  CHECK(pts[0] == Complex{0.1, 0.2});
  CHECK(std::abs(std::abs(pts[1] - pts[0]) - 0.15) < 1e-15);
  CHECK(std::abs(std::abs(pts[16] - pts[0]) - 0.3) < 1e-15);
}

TEST_CASE("holomorphic samples pass, antiholomorphic fail") {
  Stencil st = Stencil::standard({0.2, -0.1}, 0.05);
  st.sample([](Complex t) { return std::vector<Complex>{std::exp(t), 1.0 / (2.0 - t)}; });
  const HoloVerdict ok = cr_residual(st);
  CHECK(ok.pass);
  CHECK(ok.cr < 1e-3);
  CHECK(ok.morera < 1e-10);
  CHECK(std::abs(ok.dt[0] - std::exp(Complex{0.2, -0.1})) < 1e-3);

  st.sample([](Complex t) { return std::vector<Complex>{std::conj(t) + 1.0}; });
  const HoloVerdict bad = cr_residual(st);
  CHECK_FALSE(bad.pass);
  CHECK(bad.cr > 0.1);

  // Mixed dependence: cr is |B| / |A|.
  st.sample([](Complex t) { return std::vector<Complex>{3.0 + 2.0 * t + 0.5 * std::conj(t)}; });
  CHECK(cr_residual(st).cr == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("cr is scale invariant and the verdict deterministic") {
  Stencil a = Stencil::standard(0.0, 0.05), b = a;
  a.sample([](Complex t) { return std::vector<Complex>{1.0 + t + 0.01 * std::conj(t)}; });
  b.sample([](Complex t) { return std::vector<Complex>{1e6 * (1.0 + t + 0.01 * std::conj(t))}; });
  CHECK(cr_residual(a).cr == doctest::Approx(cr_residual(b).cr).epsilon(1e-9));
  CHECK(cr_residual(a).cr == cr_residual(a).cr);
}

TEST_CASE("holotest errors") {
  Stencil st = Stencil::standard(0.0, 0.05);
  CHECK_THROWS_CODE(cr_residual(st), ErrorCode::MissingSample);
  st.sample([](Complex t) { return std::vector<Complex>{t}; });
  st.samples[3].push_back(1.0);
  CHECK_THROWS_CODE(cr_residual(st), ErrorCode::DimensionMismatch);
  Stencil one = Stencil::standard(0.0, 0.05);
  one.radii = {0.02};
  one.sample([](Complex t) { return std::vector<Complex>{t}; });
  CHECK_THROWS_CODE(cr_residual(one), ErrorCode::IllConditioned);
  Stencil few = Stencil::standard(0.0, 0.05);
  few.angles_per_ring = 4;
  few.sample([](Complex t) { return std::vector<Complex>{t}; });
  CHECK_THROWS_CODE(cr_residual(few), ErrorCode::IllConditioned);
  Stencil dup = Stencil::standard(0.0, 0.05);
  dup.radii = {0.02, 0.02};
  dup.sample([](Complex t) { return std::vector<Complex>{t}; });
  CHECK_THROWS_CODE(cr_residual(dup), ErrorCode::IllConditioned);
}

TEST_CASE("holomorphy report from a family manifest") {
  using nlohmann::json;
  const std::string dir = test::scratch_dir("holo_report");
  const Stencil st = Stencil::standard({0.0, 0.0}, 0.1);
  json t_samples = json::array(), outputs = json::array();
  int i = 0;
  for (Complex t : st.points()) {
    const Complex v = t * t + 2.0 * t;
    const std::string name = "out_" + std::to_string(i++) + ".json";
    write_file(dir + "/" + name, json{{"lambda", {v.real(), v.imag()}}, {"real", 1.0}}.dump());
    t_samples.push_back({t.real(), t.imag()});
    outputs.push_back(name);
  }
  // One output inline to cover both forms.
  outputs[0] = json{{"lambda", {0.0, 0.0}}, {"real", 1.0}};
  const json manifest = {{"stencil", {{"center", {0.0, 0.0}}, {"radii", st.radii}, {"angles", 8}}},
                         {"t_samples", t_samples},
                         {"outputs", outputs}};
  const std::string text = manifest.dump();
  const std::string report = holomorphy_report(text, "lambda", dir);
  const json v = json::parse(report);
  CHECK(v["pass"].get<bool>());
  CHECK(v["cr"].get<double>() < 1e-3);
  CHECK(v["inputs"].size() == 17);
  CHECK(report == holomorphy_report(text, "lambda", dir));
  CHECK_THROWS_CODE(holomorphy_report(text, "real", dir), ErrorCode::RealValuedSelector);
  CHECK_THROWS_CODE(holomorphy_report(text, "absent", dir), ErrorCode::MissingSample);
  json broken = manifest;
  broken["outputs"][4] = "does_not_exist.json";
  CHECK_THROWS(holomorphy_report(broken.dump(), "lambda", dir));
}
