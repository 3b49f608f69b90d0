#include <cstdio>
#include <filesystem>

#include "cli.hpp"
#include "qsweld/holotest.hpp"
#include "qsweld/io.hpp"
#include "qsweld/motions.hpp"
#include "qsweld/surfaces.hpp"

namespace qsweld::cli {

namespace fs = std::filesystem;

namespace {

Json cjson(Complex z) { return Json::array({z.real(), z.imag()}); }

Json cjson(const std::vector<Complex>& v) {
  Json a = Json::array();
  for (const Complex& z : v) {
    if (is_infinite(z)) a.push_back("inf");
    else a.push_back(cjson(z));
  }
  return a;
}

Complex to_complex(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw ConfigError("expected a complex number [re, im], got " + j.dump());
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

std::string resolve(const Context& ctx, const std::string& path) {
  fs::path p = path;
  if (p.is_relative()) p = fs::path(ctx.base_dir) / p;
  if (!fs::exists(p)) throw ConfigError("input file not found: " + path);
  return p.string();
}

std::string out_path(const Context& ctx, const std::string& name) {
  return (fs::path(ctx.output_dir) / name).string();
}

void record_file(Outcome& out, const std::string& name) { out.files.push_back(name); }

double tolerance(const Context& ctx, const std::string& name) {
  const Json& t = ctx.config.at("tolerances");
  if (!t.contains(name) || !t[name].is_number()) throw ConfigError("missing tolerance '" + name + "'");
  const double v = t[name].get<double>();
  if (!(v > 0.0)) throw ConfigError("tolerance '" + name + "' must be positive");
  return v;
}

GridSpec grid_of(const Context& ctx) {
  const Json& g = ctx.config.at("grid");
  GridSpec grid{g.at("L").get<double>(), g.at("N").get<int>()};
  try {
    grid.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return grid;
}

// ---- input builders ----------------------------------------------------------

CircleMap make_circle_map(const Context& ctx, const Json& spec, Outcome& out, const std::string& key) {
  if (spec.is_string() || (spec.is_object() && spec.contains("file"))) {
    const std::string path = resolve(ctx, spec.is_string() ? spec.get<std::string>() : spec["file"].get<std::string>());
    const std::string text = read_file(path);
    out.inputs[key] = fnv1a64_hex(text);
    return circle_map_from_json(text);
  }
  out.inputs[key] = fnv1a64_hex(spec.dump());
  const std::string kind = spec.value("kind", "identity");
  const int m = spec.value("samples", 256);
  if (kind == "identity") return CircleMap::identity(m);
  if (kind == "rotation") return CircleMap::rotation(spec.value("alpha", 0.0), m);
  if (kind == "sine")
    return CircleMap::sine(spec.value("amplitude", 0.3), m, spec.value("frequency", 1), spec.value("phase", 0.0));
  if (kind == "mobius") return CircleMap::disk_automorphism(to_complex(spec.at("a")), m);
  if (kind == "lift") {
    std::vector<double> s = spec.at("values").get<std::vector<double>>();
    return CircleMap::from_samples(std::move(s));
  }
  throw ConfigError("unknown circle map kind '" + kind + "'");
}

std::function<Complex(Complex)> field_function(const Json& spec) {
  const std::string kind = spec.value("kind", "");
  if (kind == "radial_stretch") {
    const double k = spec.value("k", 0.3), r0 = spec.value("r_min", 0.0), r1 = spec.value("r_max", 1.0);
    return [=](Complex z) -> Complex {
      const double r = std::abs(z);
      if (r < r0 || r > r1) return 0.0;
      return r == 0.0 ? Complex{k} : k * z / std::conj(z);
    };
  }
  if (kind == "bump") {
    const Complex c = spec.contains("center") ? to_complex(spec["center"]) : Complex{0.0};
    const double r = spec.value("radius", 0.5);
    const Complex a = spec.contains("amplitude") ? to_complex(spec["amplitude"]) : Complex{0.3};
    return [=](Complex z) -> Complex {
      const double q = std::norm(z - c) / (r * r);
      return q < 1.0 ? a * (1.0 - q) * (1.0 - q) : Complex{0.0};
    };
  }
  if (kind == "constant") {
    const Complex v = to_complex(spec.at("value"));
    const double r = spec.value("radius", 1.0);
    return [=](Complex z) { return std::abs(z) <= r ? v : Complex{0.0}; };
  }
  throw ConfigError("unknown field kind '" + kind + "'");
}

BeltramiField make_field(const Context& ctx, const Json& spec, const GridSpec& grid, Outcome& out,
                         const std::string& key) {
  if (spec.is_string() || spec.contains("file")) {
    const std::string path = resolve(ctx, spec.is_string() ? spec.get<std::string>() : spec["file"].get<std::string>());
    out.inputs[key] = fnv1a64_hex(read_file(path));
    BeltramiField f = load_beltrami(path);
    if (!(f.grid == grid)) throw ConfigError("field " + path + " is on a different grid");
    return f;
  }
  out.inputs[key] = fnv1a64_hex(spec.dump());
  return BeltramiField::from_function(grid, field_function(spec), grid.half_width * std::sqrt(2.0));
}

Orientation orientation_of(const Json& j) {
  const std::string s = j.get<std::string>();
  if (s == "in") return Orientation::Incoming;
  if (s == "out") return Orientation::Outgoing;
  throw ConfigError("orientation must be \"in\" or \"out\"");
}

Disk disk_of(const Json& j) {
  return {to_complex(j.at("c")), j.at("r").get<double>(), j.value("exterior", false)};
}

RiggedSurface make_surface(const Context& ctx, const Json& spec, const GridSpec& grid, Outcome& out,
                           const std::string& key) {
  RiggedSurface s;
  if (spec.is_string() || spec.contains("file")) {
    const std::string path = resolve(ctx, spec.is_string() ? spec.get<std::string>() : spec["file"].get<std::string>());
    const std::string text = read_file(path);
    out.inputs[key] = fnv1a64_hex(text);
    s = rigged_surface_from_json(text, fs::path(path).parent_path().string());
  } else {
    out.inputs[key] = fnv1a64_hex(spec.dump());
    if (spec.contains("annulus")) {
      const Json& a = spec["annulus"];
      s = RiggedSurface::annulus(a.at("r_inner").get<double>(), a.at("r_outer").get<double>(),
                                 orientation_of(a.value("inner", Json("in"))),
                                 orientation_of(a.value("outer", Json("out"))));
    } else if (spec.contains("circle_domain")) {
      const Json& c = spec["circle_domain"];
      std::vector<Disk> holes;
      for (const auto& h : c.at("holes")) holes.push_back(disk_of(h));
      s = RiggedSurface::circle_domain(disk_of(c.at("outer")), holes);
      if (c.contains("orientations")) {
        s.orientations.clear();
        for (const auto& o : c["orientations"]) s.orientations.push_back(orientation_of(o));
      }
    } else if (spec.contains("disks")) {
      s = rigged_surface_from_json(spec.dump(), ctx.base_dir);
    } else {
      throw ConfigError("surface spec needs file, annulus, circle_domain or disks");
    }
  }
  if (spec.is_object() && spec.contains("riggings_override")) {
    for (auto it = spec["riggings_override"].begin(); it != spec["riggings_override"].end(); ++it) {
      const int k = std::stoi(it.key());
      if (k < 0 || k >= s.boundary_count()) throw ConfigError("rigging override index out of range");
      s.riggings[k] = make_circle_map(ctx, it.value(), out, key + ".rigging" + it.key());
    }
  }
  if (spec.is_object() && spec.contains("marking_field"))
    s.marking = make_field(ctx, spec["marking_field"], grid, out, key + ".marking");
  if (s.marking && !(s.marking->grid == grid)) throw ConfigError("surface marking is on a different grid");
  s.validate(&grid);
  return s;
}

Stencil stencil_of(const Json& spec) {
  Stencil st = Stencil::standard(to_complex(spec.value("center", Json::array({0.0, 0.0}))),
                                 spec.value("radius", 0.05));
  if (spec.contains("radii")) st.radii = spec["radii"].get<std::vector<double>>();
  if (spec.contains("angles")) st.angles_per_ring = spec["angles"].get<int>();
  return st;
}

Json stencil_json(const Stencil& st) {
  return {{"center", cjson(st.center)}, {"radii", st.radii}, {"angles", st.angles_per_ring}};
}

std::string indexed(const char* stem, std::size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03zu.%s", stem, i, ext);
  return buf;
}

Json verdict_json(const HoloVerdict& v) {
  Json comps = Json::array();
  for (std::size_t c = 0; c < v.cr_components.size(); ++c)
    comps.push_back({{"cr", v.cr_components[c]}, {"morera", v.morera_components[c]}});
  return {{"cr", v.cr}, {"morera", v.morera}, {"pass", v.pass},
          {"thresholds", {{"cr", v.thresholds.cr}, {"morera", v.thresholds.morera}, {"epsilon", v.thresholds.epsilon}}},
          {"components", comps}};
}

// Runs a stencil family: one JSON record per t plus a family manifest the
// holotest command can read back.
HoloVerdict run_family(const Context& ctx, Outcome& out, Stencil& st,
                       const std::function<Json(Complex, std::size_t)>& record,
                       const std::string& selector, const HoloThresholds& th, const Json& grids) {
  Json t_samples = Json::array(), outputs = Json::array();
  const std::vector<Complex> pts = st.points();
  st.samples.clear();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Json rec = record(pts[i], i);
    rec["t"] = cjson(pts[i]);
    const std::string name = indexed("t", i, "json");
    write_file(out_path(ctx, name), canonical_json(rec.dump()) + "\n");
    record_file(out, name);
    t_samples.push_back(cjson(pts[i]));
    outputs.push_back(name);
    std::vector<Complex> v;
    for (const auto& e : rec.at(selector)) v.push_back(to_complex(e));
    st.samples.push_back(std::move(v));
    ctx.log->info("sample " + std::to_string(i + 1) + "/" + std::to_string(pts.size()));
  }
  Json family = {{"stencil", stencil_json(st)}, {"t_samples", t_samples}, {"outputs", outputs},
                       {"selector", selector}};
  if (!grids.empty()) family["grids"] = grids;
  write_file(out_path(ctx, "family.json"), canonical_json(family.dump()) + "\n");
  record_file(out, "family.json");
  out.results["t_samples"] = t_samples;
  out.results["outputs"] = outputs;
  out.results["stencil"] = stencil_json(st);
  const HoloVerdict v = cr_residual(st, th);
  out.results["holotest"] = verdict_json(v);
  return v;
}

HoloThresholds thresholds_of(const Context& ctx) {
  HoloThresholds th;
  th.cr = tolerance(ctx, "cr");
  th.morera = tolerance(ctx, "morera");
  return th;
}

// ---- commands ----------------------------------------------------------------

Outcome cmd_weld(const Context& ctx) {
  Outcome out;
  const GridSpec grid = grid_of(ctx);
  const Json& in = ctx.config.at("inputs");
  const CircleMap h = make_circle_map(ctx, in.at("h"), out, "h");
  WeldOptions opt;
  opt.fit_samples = in.value("fit_samples", opt.fit_samples);
  opt.seam_samples = in.value("seam_samples", opt.seam_samples);
  const WeldingResult r = weld_diagnostic(h, grid, opt);
  const double full = welding_residual(r, h);
  const CircleFit fit = fit_circle(r.seam);
  save(out_path(ctx, "F.qwgr"), r.F);
  save(out_path(ctx, "G.qwgr"), r.G);
  write_polyline_csv(out_path(ctx, "seam.csv"), r.seam);
  for (const char* f : {"F.qwgr", "G.qwgr", "seam.csv"}) record_file(out, f);
  out.results = {{"residual", r.residual},
                 {"welding_residual", full},
                 {"qs_constant", r.qs_estimate},
                 {"iterations", r.stats.iterations},
                 {"solver_residual", r.stats.residual},
                 {"mu_sup", r.mu_sup},
                 {"grid", {{"L", grid.half_width}, {"N", grid.n}}},
                 {"seam_fit", {{"center", cjson(fit.center)}, {"radius", fit.radius},
                               {"relative_deviation", fit.max_deviation / fit.radius}}}};
  out.check("residual", full, tolerance(ctx, "residual"));
  return out;
}

SewOptions sew_options(const Context& ctx) {
  SewOptions o;
  o.weld_tol = tolerance(ctx, "weld");
  o.chart_tol = tolerance(ctx, "chart");
  return o;
}

Outcome cmd_sew(const Context& ctx) {
  Outcome out;
  const GridSpec grid = grid_of(ctx);
  const Json& in = ctx.config.at("inputs");
  const RiggedSurface x = make_surface(ctx, in.at("x"), grid, out, "x");
  const RiggedSurface y = make_surface(ctx, in.at("y"), grid, out, "y");
  const int i = in.at("i").get<int>(), j = in.at("j").get<int>();
  const SewOptions opt = sew_options(ctx);
  const SewnSurface s = sew(x, i, y, j, grid, opt);

  write_polyline_csv(out_path(ctx, "seam.csv"), s.seam);
  record_file(out, "seam.csv");
  Json boundaries = Json::array();
  for (std::size_t b = 0; b < s.boundaries.size(); ++b) {
    const std::string name = indexed("boundary", b, "csv");
    write_polyline_csv(out_path(ctx, name), s.boundaries[b].curve);
    record_file(out, name);
    boundaries.push_back({{"side", s.boundaries[b].side == Side::X ? "X" : "Y"},
                          {"source_index", s.boundaries[b].source_index},
                          {"orientation", s.boundaries[b].orientation == Orientation::Incoming ? "in" : "out"},
                          {"curve", name}});
  }
  const std::vector<Complex> base = invariants(s, BeltramiField::zero(grid));
  out.results = {{"chart_mismatch", s.atlas.chart_mismatch},
                 {"weld_residual", s.atlas.weld.residual},
                 {"h_is_rotation", s.atlas.h.is_rotation(1e-12)},
                 {"boundaries", boundaries},
                 {"invariants", cjson(base)}};
  if (base.size() == 1) out.results["modulus"] = base[0].real();
  out.check("weld_residual", s.atlas.weld.residual, opt.weld_tol);
  out.check("chart_mismatch", s.atlas.chart_mismatch, opt.chart_tol);
  if (in.contains("expected_modulus") && in["expected_modulus"].is_number()) {
    const double err = std::abs(base.at(0).real() - in["expected_modulus"].get<double>());
    out.results["modulus_error"] = err;
    out.check("modulus_error", err, tolerance(ctx, "modulus"));
  }

  const bool marked = (x.marking && !x.marking->is_zero()) || (y.marking && !y.marking->is_zero());
  if (marked) {
    const BeltramiField mu = S_beltrami(x, y, s, grid);
    save(out_path(ctx, "mu_sewn.qwgr"), mu);
    record_file(out, "mu_sewn.qwgr");
    const std::vector<Complex> st = invariants(s, mu);
    out.results["invariants_marked"] = cjson(st);
    if (in.value("commuted", false)) {
      const std::vector<Complex> sc = S_T_commuted(x, i, y, j, grid, opt);
      out.results["invariants_commuted"] = cjson(sc);
      double gap = 0.0;
      for (std::size_t k = 0; k < std::min(st.size(), sc.size()); ++k) gap = std::max(gap, std::abs(st[k] - sc[k]));
      out.results["commutation_gap"] = gap;
      out.check("commutation_gap", gap, tolerance(ctx, "commutation"));
    }
  }
  return out;
}

Outcome cmd_caps(const Context& ctx) {
  Outcome out;
  const GridSpec grid = grid_of(ctx);
  const Json& in = ctx.config.at("inputs");
  RiggedSurface x = make_surface(ctx, in.at("surface"), grid, out, "surface");
  CapOptions opt;
  opt.cap_radius = in.value("cap_radius", opt.cap_radius);
  const PuncturedSurface p = sew_caps(x, grid, opt);
  write_polyline_csv(out_path(ctx, "marked_points.csv"), p.marked_points);
  save(out_path(ctx, "total_mu.qwgr"), p.total_mu);
  record_file(out, "marked_points.csv");
  record_file(out, "total_mu.qwgr");
  const std::vector<Complex> inv = invariants(p);
  out.results = {{"marked_points", cjson(p.marked_points)},
                 {"base_points", cjson(p.base_points)},
                 {"invariants", cjson(inv)},
                 {"iterations", p.stats.iterations},
                 {"normalized_configuration", cjson(normalized_configuration(p.marked_points))}};
  if (in.contains("twist") && in["twist"].is_object()) {
    const Json& t = in["twist"];
    const RiggedSurface tw = dehn_twist_boundary(x, t.at("boundary").get<int>(), t.value("width", 0.5), grid,
                                                 t.value("turns", 1.0));
    const std::vector<Complex> ti = invariants(sew_caps(tw, grid, opt));
    double gap = 0.0;
    for (std::size_t k = 0; k < std::min(inv.size(), ti.size()); ++k) gap = std::max(gap, std::abs(inv[k] - ti[k]));
    out.results["twisted_invariants"] = cjson(ti);
    out.results["twist_gap"] = gap;
    out.results["twist_mu_sup"] = tw.marking->sup_norm();
    out.check("twist_gap", gap, tolerance(ctx, "twist"));
  }
  return out;
}

Outcome cmd_motion(const Context& ctx) {
  Outcome out;
  const GridSpec grid = grid_of(ctx);
  const Json& in = ctx.config.at("inputs");
  const Json& map = in.at("map");
  PlaneMap u;
  std::function<Complex(Complex)> closed_form;
  if (map.is_string() || map.contains("file")) {
    const std::string path = resolve(ctx, map.is_string() ? map.get<std::string>() : map["file"].get<std::string>());
    out.inputs["map"] = fnv1a64_hex(read_file(path));
    u = load_plane_map(path);
    if (!(u.grid == grid)) throw ConfigError("map grid differs from the configured grid");
  } else {
    out.inputs["map"] = fnv1a64_hex(map.dump());
    if (map.value("kind", "") != "radial_stretch") throw ConfigError("map kind must be radial_stretch or a file");
    const double k = map.value("k", 0.3);
    const double a = 2.0 * k / (1.0 - k);
    closed_form = [a](Complex z) -> Complex {
      const double r = std::abs(z);
      return r <= 1.0 ? z * std::pow(r, a) : z;
    };
    u = PlaneMap::sample(grid, closed_form);
  }
  const MotionFamily fam = embed_in_motion(u);
  const MotionRecipe& r = fam.recipe();
  out.results["recipe"] = {{"a", cjson(r.a)}, {"b", cjson(r.b)}, {"ell", r.ell}, {"k", r.k}};
  out.results["t_star"] = fam.t_star();
  out.results["radius"] = fam.radius();

  std::vector<Complex> probes;
  for (const auto& p : in.at("probes")) probes.push_back(to_complex(p));
  const double eval_radius = in.value("eval_radius", 2.0);
  const double slack = tolerance(ctx, "budget_slack");
  const bool write_grids = in.value("write_grids", true);

  double worst_budget = -1e300;
  Stencil st = stencil_of(in.at("stencil"));
  Json grids = Json::array();
  const HoloVerdict v = run_family(ctx, out, st, [&](Complex t, std::size_t i) {
    SolveStats stats;
    const PlaneMap ut = fam.sample(t, &stats);
    double sup = 0.0;
    const BeltramiField mu = dilatation(ut);
    for (int k = 0; k < grid.n; ++k)
      for (int j = 0; j < grid.n; ++j)
        if (std::abs(grid.node(j, k)) <= eval_radius) sup = std::max(sup, std::abs(mu.values[grid.index(j, k)]));
    const double K = maximal_dilatation(sup), bound = maximal_dilatation(std::abs(t));
    worst_budget = std::max(worst_budget, K - bound);
    std::vector<Complex> vals;
    for (const Complex& z : probes) vals.push_back(ut(z));
    if (write_grids) {
      const std::string name = indexed("u", i, "qwgr");
      save(out_path(ctx, name), ut);
      record_file(out, name);
      grids.push_back(name);
    }
    return Json{{"probes", cjson(vals)}, {"K", K}, {"bound", bound}, {"iterations", stats.iterations}};
  }, "probes", thresholds_of(ctx), grids);
  out.results["grids"] = grids;
  out.check("holotest_cr", v.cr, tolerance(ctx, "cr"));
  out.check("holotest_morera", v.morera, tolerance(ctx, "morera"));

  // Dilatation budget at the radii where it is quoted.
  Json budget = Json::array();
  for (const auto& tj : in.at("budget_t")) {
    const Complex t = to_complex(tj);
    const PlaneMap ut = fam.sample(t);
    const BeltramiField mu = dilatation(ut);
    double sup = 0.0;
    for (int k = 0; k < grid.n; ++k)
      for (int j = 0; j < grid.n; ++j)
        if (std::abs(grid.node(j, k)) <= eval_radius) sup = std::max(sup, std::abs(mu.values[grid.index(j, k)]));
    const double K = maximal_dilatation(sup), bound = maximal_dilatation(std::abs(t));
    worst_budget = std::max(worst_budget, K - bound);
    budget.push_back({{"t", cjson(t)}, {"K", K}, {"bound", bound}});
  }
  out.results["budget"] = budget;
  out.results["budget_excess"] = worst_budget;
  out.check("budget_excess", worst_budget, slack);

  if (in.value("recovery", true)) {
    const PlaneMap us = fam.sample(fam.t_star());
    double err = 0.0;
    for (int k = 0; k < grid.n; ++k)
      for (int j = 0; j < grid.n; ++j) {
        const Complex z = grid.node(j, k);
        if (std::abs(z) > eval_radius) continue;
        const Complex ref = closed_form ? closed_form(z) : u.values[grid.index(j, k)];
        err = std::max(err, std::abs(us.values[grid.index(j, k)] - ref));
      }
    out.results["recovery_error"] = err;
    out.check("recovery_error", err, tolerance(ctx, "recovery"));
  }
  return out;
}

Outcome cmd_family(const Context& ctx) {
  Outcome out;
  const GridSpec grid = grid_of(ctx);
  const Json& in = ctx.config.at("inputs");
  const std::string kind = in.value("kind", "cutout");
  RiggedSurface x = make_surface(ctx, in.at("surface"), grid, out, "surface");
  Stencil st = stencil_of(in.at("stencil"));
  const HoloThresholds th = thresholds_of(ctx);
  std::function<Json(Complex, std::size_t)> record;

  const bool write_grids = in.value("write_grids", true);
  Json grids = Json::array();
  auto capped_record = [&](const PuncturedSurface& p, std::size_t i) {
    if (write_grids) {
      const std::string name = indexed("w", i, "qwgr");
      save(out_path(ctx, name), p.w);
      record_file(out, name);
      grids.push_back(name);
    }
    return Json{{"invariants", cjson(invariants(p))}, {"marked_points", cjson(p.marked_points)},
                {"iterations", p.stats.iterations}};
  };

  std::optional<CutoutFamily> cut;
  BeltramiField nu = BeltramiField::zero(grid);
  if (kind == "cutout") {
    const int boundary = in.at("boundary").get<int>();
    std::vector<FourierMode> dir;
    for (const auto& m : in.value("direction", Json::array()))
      dir.push_back({m.at("n").get<int>(), to_complex(m.at("coeff"))});
    const RiggingFamily fam = rigging_family(x.riggings.at(boundary), dir, in.value("radius", 0.5),
                                             to_complex(in.value("translation", Json::array({0.0, 0.0}))));
    cut.emplace(family_of_cutouts(x, boundary, fam));
    const std::string route = in.value("route", "pullback");
    if (route != "pullback" && route != "direct") throw ConfigError("route must be pullback or direct");
    record = [&, route](Complex t, std::size_t i) {
      const RiggedSurface s = route == "pullback" ? cut->pullback(t, grid) : cut->surface(t);
      return capped_record(sew_caps(s, grid), i);
    };
  } else if (kind == "marking") {
    nu = make_field(ctx, in.at("nu"), grid, out, "nu");
    const bool conj = in.value("conjugate", false);
    record = [&, conj](Complex t, std::size_t i) {
      RiggedSurface s = x;
      const Complex c = conj ? std::conj(t) : t;
      std::vector<Complex> vals(nu.values);
      for (Complex& v : vals) v *= c;
      s.marking = BeltramiField::make(grid, std::move(vals), nu.support_radius);
      return capped_record(sew_caps(s, grid), i);
    };
  } else {
    throw ConfigError("family kind must be cutout or marking");
  }
  const HoloVerdict v = run_family(ctx, out, st, record, "invariants", th, grids);
  out.results["grids"] = grids;
  if (in.value("expect_fail", false)) {
    out.check("holotest_cr_exceeds", v.cr, tolerance(ctx, "fail_cr"), false);
  } else {
    out.check("holotest_cr", v.cr, th.cr);
    out.check("holotest_morera", v.morera, th.morera);
  }
  return out;
}

Outcome cmd_holotest(const Context& ctx) {
  Outcome out;
  const Json& in = ctx.config.at("inputs");
  const std::string path = resolve(ctx, in.at("manifest").get<std::string>());
  const std::string text = read_file(path);
  out.inputs["manifest"] = fnv1a64_hex(text);
  const HoloThresholds th = thresholds_of(ctx);
  const std::string selector = in.value("selector", "invariants");
  const std::string verdict = holomorphy_report(text, selector, fs::path(path).parent_path().string(), th);
  write_file(out_path(ctx, "verdict.json"), verdict + "\n");
  record_file(out, "verdict.json");
  const Json v = Json::parse(verdict);
  out.results = v;
  out.check("cr", v.at("cr").get<double>(), th.cr);
  out.check("morera", v.at("morera").get<double>(), th.morera);
  return out;
}

Outcome cmd_qs(const Context& ctx) {
  Outcome out;
  const Json& in = ctx.config.at("inputs");
  const int density = in.value("density", 256);
  QsReport rep;
  if (in.contains("line")) {
    const std::string line = in["line"].get<std::string>();
    out.inputs["line"] = fnv1a64_hex(in["line"].dump());
    std::function<double(double)> f;
    if (line == "cubic") f = [](double x) { return x * x * x; };
    else if (line == "affine") f = [](double x) { return 2.0 * x + 1.0; };
    else throw ConfigError("line map must be cubic or affine");
    rep = qs_constant_line(f, density);
  } else {
    rep = qs_constant(make_circle_map(ctx, in.at("h"), out, "h"), density);
  }
  out.results = {{"k_estimate", rep.k_estimate},
                 {"worst_pair", {{"x", rep.worst_pair.x}, {"t", rep.worst_pair.t}}},
                 {"cayley_used", rep.cayley_used},
                 {"density", density}};
  if (in.contains("expected") && in["expected"].is_number()) {
    const double e = in["expected"].get<double>();
    const double rel = std::abs(rep.k_estimate - e) / e;
    out.results["relative_error"] = rel;
    out.check("relative_error", rel, tolerance(ctx, "relative"));
  }
  return out;
}

std::vector<Complex> polyline_of(const Context& ctx, const Json& spec, Outcome& out, const std::string& key) {
  if (spec.is_string()) {
    const std::string path = resolve(ctx, spec.get<std::string>());
    out.inputs[key] = fnv1a64_hex(read_file(path));
    return read_polyline_csv(path);
  }
  out.inputs[key] = fnv1a64_hex(spec.dump());
  const Json& c = spec.at("circle");
  const Complex centre = to_complex(c.at("c"));
  const double r = c.at("r").get<double>();
  const int n = c.value("samples", 512);
  std::vector<Complex> pts(n);
  for (int s = 0; s < n; ++s) pts[s] = centre + std::polar(r, kTwoPi * s / n);
  return pts;
}

Outcome cmd_modulus(const Context& ctx) {
  Outcome out;
  const Json& in = ctx.config.at("inputs");
  std::vector<Complex> inner = polyline_of(ctx, in.at("inner"), out, "inner");
  std::vector<Complex> outer = polyline_of(ctx, in.at("outer"), out, "outer");
  if (in.contains("mobius")) {
    const Json& m = in["mobius"];
    const Mobius mb{to_complex(m.at(0)), to_complex(m.at(1)), to_complex(m.at(2)), to_complex(m.at(3))};
    for (Complex& z : inner) z = mb(z);
    for (Complex& z : outer) z = mb(z);
    // A Mobius map may swap the complementary components.
    if (!point_in_polygon(outer, inner.front())) std::swap(inner, outer);
  }
  const double m = modulus(inner, outer, in.value("degree", 24));
  out.results = {{"modulus", m}};
  if (in.contains("expected") && in["expected"].is_number()) {
    const double e = in["expected"].get<double>();
    const double rel = std::abs(m - e) / e;
    out.results["relative_error"] = rel;
    out.check("relative_error", rel, tolerance(ctx, "relative"));
  }
  return out;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"weld", "sew", "caps", "motion", "family", "holotest", "qs", "modulus"};
  return c;
}

Json default_config(const std::string& command) {
  Json c = {{"command", command},
            {"grid", {{"L", 2.0}, {"N", 256}}},
            {"tolerances", Json::object()},
            {"inputs", Json::object()},
            {"output_dir", "qsweld_out"},
            {"seed", 0}};
  const Json annulus_x = {{"annulus", {{"r_inner", 0.5}, {"r_outer", 1.0}, {"inner", "out"}, {"outer", "out"}}}};
  const Json annulus_y = {{"annulus", {{"r_inner", 1.0}, {"r_outer", 2.0}, {"inner", "in"}, {"outer", "in"}}}};
  const Json four = {{"circle_domain",
                      {{"outer", {{"c", {0.0, 0.0}}, {"r", 1.0}}},
                       {"holes", {{{"c", {0.0, 0.5}}, {"r", 0.12}},
                                  {{"c", {-0.43301270189221935, -0.25}}, {"r", 0.12}},
                                  {{"c", {0.43301270189221935, -0.25}}, {"r", 0.12}}}}}}};
  if (command == "weld") {
    c["tolerances"] = {{"residual", 1e-3}};
    c["inputs"] = {{"h", {{"kind", "sine"}, {"amplitude", 0.3}, {"samples", 1024}}}};
  } else if (command == "sew") {
    c["grid"] = {{"L", 4.0}, {"N", 256}};
    c["tolerances"] = {{"weld", 1e-3}, {"chart", 1e-3}, {"modulus", 1e-3}, {"commutation", 5e-3}};
    c["inputs"] = {{"x", annulus_x}, {"y", annulus_y}, {"i", 1}, {"j", 0},
                   {"expected_modulus", std::log(4.0) / kTwoPi}, {"commuted", false}};
  } else if (command == "caps") {
    c["tolerances"] = {{"twist", 5e-3}};
    c["inputs"] = {{"surface", four}, {"cap_radius", 0.5}};
  } else if (command == "motion") {
    c["grid"] = {{"L", 2.5}, {"N", 512}};
    c["tolerances"] = {{"budget_slack", 0.05}, {"recovery", 5e-3}, {"cr", 1e-3}, {"morera", 1e-3}};
    c["inputs"] = {{"map", {{"kind", "radial_stretch"}, {"k", 0.3}}},
                   {"stencil", {{"center", {0.2, 0.0}}, {"radius", 0.05}}},
                   {"probes", {{0.3, 0.2}, {-0.5, 0.0}, {0.0, 0.7}, {1.5, 0.0}, {-1.0, 1.0}}},
                   {"budget_t", {{0.1, 0.0}, {0.0, 0.3}, {-0.5, 0.0}}},
                   {"eval_radius", 2.0},
                   {"recovery", true},
                   {"write_grids", true}};
  } else if (command == "family") {
    c["tolerances"] = {{"cr", 1e-3}, {"morera", 1e-3}, {"fail_cr", 0.1}};
    c["inputs"] = {{"kind", "cutout"}, {"surface", four}, {"boundary", 1}, {"direction", Json::array()},
                   {"radius", 0.5}, {"translation", {0.1, 0.05}}, {"route", "pullback"},
                   {"stencil", {{"center", {0.0, 0.0}}, {"radius", 0.5}}}};
  } else if (command == "holotest") {
    c["tolerances"] = {{"cr", 1e-3}, {"morera", 1e-3}};
    c["inputs"] = {{"manifest", "family.json"}, {"selector", "invariants"}};
  } else if (command == "qs") {
    c["tolerances"] = {{"relative", 0.02}};
    c["inputs"] = {{"line", "cubic"}, {"density", 1024}, {"expected", 7.0 + 4.0 * std::sqrt(3.0)}};
  } else if (command == "modulus") {
    c["tolerances"] = {{"relative", 0.01}};
    c["inputs"] = {{"inner", {{"circle", {{"c", {0.0, 0.0}}, {"r", 0.5}}}}},
                   {"outer", {{"circle", {{"c", {0.0, 0.0}}, {"r", 1.0}}}}},
                   {"expected", std::log(2.0) / kTwoPi}};
  }
  return c;
}

Outcome run_command(const std::string& command, const Context& ctx) {
  if (command == "weld") return cmd_weld(ctx);
  if (command == "sew") return cmd_sew(ctx);
  if (command == "caps") return cmd_caps(ctx);
  if (command == "motion") return cmd_motion(ctx);
  if (command == "family") return cmd_family(ctx);
  if (command == "holotest") return cmd_holotest(ctx);
  if (command == "qs") return cmd_qs(ctx);
  if (command == "modulus") return cmd_modulus(ctx);
  throw ConfigError("unknown command '" + command + "'");
}

}  // namespace qsweld::cli
