#include "qsweld/holotest.hpp"

#include <algorithm>
#include <filesystem>

#include <Eigen/Dense>

#include "json.hpp"
#include "qsweld/io.hpp"

namespace qsweld {

Stencil Stencil::standard(Complex center, double radius) {
  Stencil s;
  s.center = center;
  s.radii = {0.3 * radius, 0.6 * radius};
  s.angles_per_ring = 8;
  return s;
}

std::vector<Complex> Stencil::points() const {
  std::vector<Complex> p{center};
  for (double r : radii)
    for (int a = 0; a < angles_per_ring; ++a) p.push_back(center + std::polar(r, kTwoPi * a / angles_per_ring));
  return p;
}

void Stencil::sample(const std::function<std::vector<Complex>(Complex)>& f) {
  samples.clear();
  for (const Complex& t : points()) samples.push_back(f(t));
}

HoloVerdict cr_residual(const Stencil& st, const HoloThresholds& th) {
  if (st.radii.size() < 2 || st.angles_per_ring < 8)
    throw Error(ErrorCode::IllConditioned, "stencil needs at least two rings of eight angles");
  const std::vector<Complex> pts = st.points();
  if (st.samples.size() != pts.size())
    throw Error(ErrorCode::MissingSample, "stencil has " + std::to_string(st.samples.size()) +
                                              " samples for " + std::to_string(pts.size()) + " points");
  const std::size_t dim = st.samples.front().size();
  if (dim == 0) throw Error(ErrorCode::DimensionMismatch, "empty sample vectors");
  for (const auto& v : st.samples)
    if (v.size() != dim) throw Error(ErrorCode::DimensionMismatch, "sample vectors differ in length");
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b)
      if (std::abs(pts[a] - pts[b]) <= 1e-14 * (1.0 + std::abs(pts[a])))
        throw Error(ErrorCode::IllConditioned, "duplicate parameter values");

  const int n = static_cast<int>(pts.size());
  Eigen::MatrixXcd D(n, 3);
  for (int r = 0; r < n; ++r) {
    const Complex tau = pts[r] - st.center;
    D(r, 0) = 1.0;
    D(r, 1) = tau;
    D(r, 2) = std::conj(tau);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(D);
  const auto& sv = svd.singularValues();
  if (!(sv(2) > 1e-10 * sv(0))) throw Error(ErrorCode::IllConditioned, "stencil points are collinear");

  Eigen::MatrixXcd F(n, static_cast<Eigen::Index>(dim));
  for (int r = 0; r < n; ++r)
    for (std::size_t c = 0; c < dim; ++c) F(r, static_cast<Eigen::Index>(c)) = st.samples[r][c];
  const Eigen::MatrixXcd coef = D.colPivHouseholderQr().solve(F);

  HoloVerdict v;
  v.thresholds = th;
  double norm_a = 0.0, norm_b = 0.0, mean_all = 0.0;
  for (std::size_t c = 0; c < dim; ++c) {
    const auto ci = static_cast<Eigen::Index>(c);
    const Complex A = coef(1, ci), B = coef(2, ci);
    v.dt.push_back(A);
    v.dtbar.push_back(B);
    norm_a += std::norm(A);
    norm_b += std::norm(B);
    double mean = 0.0;
    for (int r = 0; r < n; ++r) mean += std::abs(F(r, ci));
    mean /= n;
    mean_all += mean;
    const double scale = mean > 0.0 ? mean : 1.0;
    v.cr_components.push_back(std::abs(B) / (std::abs(A) + th.epsilon * scale));

    // Trapezoidal contour integral on each ring.
    double worst = 0.0;
    int offset = 1;
    for (double rad : st.radii) {
      Complex integral = 0.0;
      double ring_mean = 0.0;
      for (int a = 0; a < st.angles_per_ring; ++a) {
        const Complex f = F(offset + a, ci);
        const Complex dt = kI * std::polar(rad, kTwoPi * a / st.angles_per_ring) *
                           (kTwoPi / st.angles_per_ring);
        integral += f * dt;
        ring_mean += std::abs(f);
      }
      ring_mean /= st.angles_per_ring;
      const double den = kTwoPi * rad * (ring_mean > 0.0 ? ring_mean : 1.0);
      worst = std::max(worst, std::abs(integral) / den);
      offset += st.angles_per_ring;
    }
    v.morera_components.push_back(worst);
  }
  mean_all /= static_cast<double>(dim);
  v.cr = std::sqrt(norm_b) / (std::sqrt(norm_a) + th.epsilon * (mean_all > 0.0 ? mean_all : 1.0));
  v.morera = *std::max_element(v.morera_components.begin(), v.morera_components.end());
  v.pass = v.cr < th.cr && v.morera < th.morera;
  return v;
}

namespace {

std::vector<Complex> select_complex(const nlohmann::json& record, const std::string& selector) {
  if (!record.is_object() || !record.contains(selector))
    throw Error(ErrorCode::MissingSample, "output lacks the field \"" + selector + "\"");
  const nlohmann::json& f = record.at(selector);
  auto as_complex = [&](const nlohmann::json& e) -> Complex {
    if (e.is_number()) throw Error(ErrorCode::RealValuedSelector, "\"" + selector + "\" is real-valued");
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw Error(ErrorCode::DimensionMismatch, "complex values must be [re, im] pairs");
    return {e[0].get<double>(), e[1].get<double>()};
  };
  if (f.is_number()) throw Error(ErrorCode::RealValuedSelector, "\"" + selector + "\" is real-valued");
  if (f.is_array() && f.size() == 2 && f[0].is_number() && f[1].is_number()) return {as_complex(f)};
  if (!f.is_array() || f.empty()) throw Error(ErrorCode::DimensionMismatch, "selector yields no values");
  if (std::all_of(f.begin(), f.end(), [](const nlohmann::json& e) { return e.is_number(); }))
    throw Error(ErrorCode::RealValuedSelector, "\"" + selector + "\" is a real vector");
  std::vector<Complex> out;
  for (const auto& e : f) out.push_back(as_complex(e));
  return out;
}

}  // namespace

std::string holomorphy_report(const std::string& text, const std::string& selector,
                              const std::string& base_dir, const HoloThresholds& th) {
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("manifest: ") + e.what());
  }
  if (!m.contains("stencil") || !m.contains("t_samples") || !m.contains("outputs"))
    throw Error(ErrorCode::InvalidArgument, "manifest needs stencil, t_samples and outputs");

  Stencil st;
  try {
    const auto& s = m.at("stencil");
    st.center = {s.at("center").at(0).get<double>(), s.at("center").at(1).get<double>()};
    st.radii = s.at("radii").get<std::vector<double>>();
    st.angles_per_ring = s.at("angles").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("stencil: ") + e.what());
  }
  const auto& ts = m.at("t_samples");
  const auto& outs = m.at("outputs");
  if (ts.size() != outs.size())
    throw Error(ErrorCode::DimensionMismatch, "t_samples and outputs differ in length");

  std::vector<Complex> t_values;
  std::vector<std::vector<Complex>> values;
  std::vector<std::string> hashes;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    t_values.emplace_back(ts[i].at(0).get<double>(), ts[i].at(1).get<double>());
    std::string bytes;
    if (outs[i].is_string()) {
      std::filesystem::path p = outs[i].get<std::string>();
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      if (!std::filesystem::exists(p)) throw Error(ErrorCode::MissingSample, "missing output " + p.string());
      bytes = read_file(p.string());
    } else {
      bytes = outs[i].dump();
    }
    hashes.push_back(fnv1a64_hex(bytes));
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MissingSample, std::string("unreadable output: ") + e.what());
    }
    values.push_back(select_complex(rec, selector));
  }

  // Match every stencil point to a provided t value.
  for (const Complex& p : st.points()) {
    std::size_t best = t_values.size();
    for (std::size_t i = 0; i < t_values.size(); ++i)
      if (std::abs(t_values[i] - p) <= 1e-9 * (1.0 + std::abs(p))) best = i;
    if (best == t_values.size())
      throw Error(ErrorCode::MissingSample, "no sample at t = (" + format_double(p.real()) + ", " +
                                                format_double(p.imag()) + ")");
    st.samples.push_back(values[best]);
  }
  const HoloVerdict v = cr_residual(st, th);

  nlohmann::json out;
  out["cr"] = v.cr;
  out["morera"] = v.morera;
  out["pass"] = v.pass;
  out["selector"] = selector;
  out["thresholds"] = {{"cr", th.cr}, {"morera", th.morera}, {"epsilon", th.epsilon}};
  out["components"] = nlohmann::json::array();
  for (std::size_t c = 0; c < v.cr_components.size(); ++c)
    out["components"].push_back({{"cr", v.cr_components[c]}, {"morera", v.morera_components[c]}});
  out["inputs"] = hashes;
  return canonical_json(out.dump());
}

}  // namespace qsweld
