#include "json.hpp"
#include "qsweld/io.hpp"
#include "support.hpp"

using namespace qsweld;

TEST_CASE("grid container round trip") {
  const std::string dir = test::scratch_dir("io_grid");
  const GridSpec g{1.5, 64};
  const auto mu = BeltramiField::from_function(g, [](Complex z) { return 0.1 * z; }, 1.0);
  save(dir + "/mu.qwgr", mu);
  const BeltramiField back = load_beltrami(dir + "/mu.qwgr");
  CHECK(back.grid == g);
  CHECK(back.values == mu.values);

  const PlaneMap f = PlaneMap::sample(g, [](Complex z) { return z * z + 1.0 / 3.0; });
  save(dir + "/f.qwgr", f);
  const PlaneMap fb = load_plane_map(dir + "/f.qwgr");
  CHECK(fb.values == f.values);

  const GridContainer c = read_grid(dir + "/f.qwgr");
  CHECK(c.kind == GridKind::PlaneMap);
  // Header layout: magic, version, N, L, kind.
  const std::string bytes = read_file(dir + "/f.qwgr");
  CHECK(bytes.substr(0, 4) == "QWGR");
  CHECK(bytes.size() == 4 + 4 + 4 + 8 + 1 + g.size() * 16);
  CHECK_THROWS_CODE(load_beltrami(dir + "/f.qwgr"), ErrorCode::Io);
  write_file(dir + "/junk.qwgr", "QWGX0000");
  CHECK_THROWS_CODE(read_grid(dir + "/junk.qwgr"), ErrorCode::Io);
  CHECK_THROWS_CODE(read_grid(dir + "/missing.qwgr"), ErrorCode::Io);
}

TEST_CASE("CSV exports") {
  const std::string dir = test::scratch_dir("io_csv");
  const std::vector<Complex> pts{{0.1, 0.2}, {1.0 / 3.0, -2.0}, {1e-300, 5e300}};
  write_polyline_csv(dir + "/p.csv", pts);
  CHECK(read_polyline_csv(dir + "/p.csv") == pts);
  const std::string text = read_file(dir + "/p.csv");
  CHECK(text.rfind("# index,re,im\n", 0) == 0);
  CHECK(text.find("0.33333333333333331") != std::string::npos);

  const GridSpec g{1.0, 64};
  std::vector<Complex> v(g.size(), Complex{0.5, -0.25});
  write_field_csv(dir + "/f.csv", g, v, 4);
  const std::string f = read_file(dir + "/f.csv");
  CHECK(f.rfind("# x,y,re,im\n", 0) == 0);
  CHECK(std::count(f.begin(), f.end(), '\n') == 1 + 16 * 16);
}

TEST_CASE("canonical JSON") {
  const std::string a = canonical_json(R"({"b": 0.1, "a": [1, 2.5], "c": {"z": true, "y": null}})");
  const std::string b = canonical_json(R"({"c": {"y": null, "z": true}, "a": [1, 2.5], "b": 0.1})");
  CHECK(a == b);
  CHECK(a.find("0.10000000000000001") != std::string::npos);
  CHECK(a.find("\"a\"") < a.find("\"b\""));
  const auto parsed = nlohmann::json::parse(a);
  CHECK(parsed["b"].get<double>() == 0.1);
  CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
}

TEST_CASE("FNV-1a reference vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64_hex("foobar") == "85944171f73967e8");
}
