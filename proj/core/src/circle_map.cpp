#include "qsweld/circle_map.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "json.hpp"

namespace qsweld {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Gauss-Legendre nodes and weights mapped to [0, 1].
void gauss_legendre(int q, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(q, 0.0);
  weights.assign(q, 0.0);
  for (int i = 0; i < q; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (q + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = 0.5 * (1.0 - x);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

CircleMap::CircleMap(std::vector<double> lift) : lift_(std::move(lift)) {
  const int m = size();
  const double d = kTwoPi / m;
  auto y = [&](int i) {
    const int q = (i >= 0 ? i / m : -((-i + m - 1) / m));
    return lift_[i - q * m] + kTwoPi * q;
  };
  slope_.resize(m);
  for (int i = 0; i < m; ++i) {
    double s = (-y(i + 2) + 8.0 * y(i + 1) - 8.0 * y(i - 1) + y(i - 2)) / (12.0 * d);
    const double lo = (y(i) - y(i - 1)) / d;
    const double hi = (y(i + 1) - y(i)) / d;
    s = std::clamp(s, 0.0, 3.0 * std::min(lo, hi));
    slope_[i] = s;
  }
}

CircleMap CircleMap::from_samples(std::vector<double> g) {
  if (g.size() < 16) throw Error(ErrorCode::InvalidArgument, "need at least 16 lift samples");
  for (double v : g)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite lift sample");
  for (std::size_t i = 1; i < g.size(); ++i)
    if (!(g[i] > g[i - 1]))
      throw Error(ErrorCode::NonMonotone, "lift samples are not strictly increasing");
  const double span = g.back() - g.front();
  if (std::abs(span - kTwoPi) > 1e-12)
    throw Error(ErrorCode::WrongDegree, "lift does not advance by exactly 2pi");
  g.pop_back();
  return CircleMap(std::move(g));
}

CircleMap CircleMap::from_lift(const std::function<double(double)>& lift, int samples) {
  if (samples < 15) throw Error(ErrorCode::InvalidArgument, "need at least 16 lift samples");
  std::vector<double> g(samples + 1);
  for (int i = 0; i < samples; ++i) g[i] = lift(kTwoPi * i / samples);
  g[samples] = g[0] + kTwoPi;
  const double end = lift(kTwoPi);
  if (std::abs(end - g[samples]) > 1e-9 * (1.0 + std::abs(end)))
    throw Error(ErrorCode::WrongDegree, "lift does not advance by 2pi");
  return from_samples(std::move(g));
}

CircleMap CircleMap::identity(int samples) {
  return from_lift([](double t) { return t; }, samples);
}

CircleMap CircleMap::rotation(double alpha, int samples) {
  std::vector<double> g(samples + 1);
  for (int i = 0; i < samples; ++i) g[i] = kTwoPi * i / samples + alpha;
  g[samples] = g[0] + kTwoPi;
  return from_samples(std::move(g));
}

CircleMap CircleMap::sine(double amplitude, int samples, int frequency, double phase) {
  const double base = amplitude * std::sin(phase);
  std::vector<double> g(samples + 1);
  for (int i = 0; i < samples; ++i) {
    const double t = kTwoPi * i / samples;
    g[i] = t + amplitude * std::sin(frequency * t + phase);
  }
  g[samples] = kTwoPi + base;
  g[0] = base;
  return from_samples(std::move(g));
}

CircleMap CircleMap::disk_automorphism(Complex a, int samples) {
  if (!(std::abs(a) < 1.0)) throw Error(ErrorCode::InvalidArgument, "automorphism centre must lie in the disk");
  return from_lift(
      [a](double t) {
        const Complex e = std::polar(1.0, t);
        return t + std::arg(1.0 - a / e) - std::arg(1.0 - std::conj(a) * e);
      },
      samples);
}

double CircleMap::lift(double theta) const {
  const int m = size();
  const double d = kTwoPi / m;
  const double u = theta / d;
  const double fl = std::floor(u);
  const double s = u - fl;
  const long long i = static_cast<long long>(fl);
  const long long q = (i >= 0 ? i / m : -((-i + m - 1) / m));
  const int i0 = static_cast<int>(i - q * m);
  const int i1 = (i0 + 1 == m) ? 0 : i0 + 1;
  const double y0 = lift_[i0];
  const double y1 = lift_[i1] + (i1 == 0 ? kTwoPi : 0.0);
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2,
               h11 = s3 - s2;
  return h00 * y0 + h10 * d * slope_[i0] + h01 * y1 + h11 * d * slope_[i1] + kTwoPi * q;
}

double CircleMap::lift_derivative(double theta) const {
  const int m = size();
  const double d = kTwoPi / m;
  const double u = theta / d;
  const double fl = std::floor(u);
  const double s = u - fl;
  const long long i = static_cast<long long>(fl);
  const long long q = (i >= 0 ? i / m : -((-i + m - 1) / m));
  const int i0 = static_cast<int>(i - q * m);
  const int i1 = (i0 + 1 == m) ? 0 : i0 + 1;
  const double y0 = lift_[i0];
  const double y1 = lift_[i1] + (i1 == 0 ? kTwoPi : 0.0);
  const double s2 = s * s;
  const double d00 = 6 * s2 - 6 * s, d10 = 3 * s2 - 4 * s + 1, d01 = -6 * s2 + 6 * s,
               d11 = 3 * s2 - 2 * s;
  return (d00 * y0 + d01 * y1) / d + d10 * slope_[i0] + d11 * slope_[i1];
}

double CircleMap::inverse_lift(double phi) const {
  const int m = size();
  const double g0 = lift_[0];
  const double q = std::floor((phi - g0) / kTwoPi);
  double target = phi - kTwoPi * q;
  if (target >= g0 + kTwoPi) target = g0 + kTwoPi;
  // Interval [lift_i, lift_{i+1}) containing the target.
  auto it = std::upper_bound(lift_.begin(), lift_.end(), target);
  const int i = static_cast<int>(it - lift_.begin()) - 1;
  const double d = kTwoPi / m;
  double lo = i * d, hi = (i + 1) * d;
  double t = lo + d * (target - lift_[i]) /
                      ((i + 1 < m ? lift_[i + 1] : g0 + kTwoPi) - lift_[i]);
  for (int iter = 0; iter < 100; ++iter) {
    const double f = lift(t) - target;
    if (f == 0.0) break;
    if (f > 0.0) hi = t; else lo = t;
    const double fp = lift_derivative(t);
    double next = (fp > 0.0) ? t - f / fp : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-16 * (1.0 + std::abs(t)) || hi - lo <= 1e-16 * (1.0 + std::abs(t))) {
      t = next;
      break;
    }
    t = next;
  }
  return t + kTwoPi * q;
}

Complex CircleMap::operator()(Complex z) const { return std::polar(1.0, lift(std::arg(z))); }

bool CircleMap::is_rotation(double tol) const {
  const int m = size();
  const double g0 = lift_[0];
  for (int i = 1; i < m; ++i)
    if (std::abs(lift_[i] - kTwoPi * i / m - g0) > tol * (1.0 + std::abs(g0) + kTwoPi)) return false;
  return true;
}

QsReport qs_constant_line(const std::function<double(double)>& f, int density) {
  if (density < 4) throw Error(ErrorCode::InvalidArgument, "grid density too small");
  static const double kFrac[8] = {std::exp2(0.0 / 8), std::exp2(1.0 / 8), std::exp2(2.0 / 8),
                                  std::exp2(3.0 / 8), std::exp2(4.0 / 8), std::exp2(5.0 / 8),
                                  std::exp2(6.0 / 8), std::exp2(7.0 / 8)};
  const double t0 = kTwoPi / density;
  std::vector<double> ts;
  for (int k = 0;; ++k) {
    const double t = std::ldexp(t0 * kFrac[k % 8], k / 8);
    if (t > kPi) break;
    ts.push_back(t);
  }
  QsReport rep;
  for (int j = 1; j < density; ++j) {
    const double x = std::tan(kPi * j / density - 0.5 * kPi);
    const double fx = f(x);
    for (double t : ts) {
      const double num = f(x + t) - fx;
      const double den = fx - f(x - t);
      if (!(den >= 1e-14) || !(num >= 1e-14))
        throw Error(ErrorCode::DegenerateRatio, "quasisymmetry ratio denominator vanishes");
      const double m = num / den;
      const double r = std::max(m, 1.0 / m);
      if (r > rep.k_estimate) {
        rep.k_estimate = r;
        rep.worst_pair.x = x;
        rep.worst_pair.t = t;
      }
    }
  }
  return rep;
}

QsReport qs_constant(const CircleMap& h, int density) {
  if (density < 64) throw Error(ErrorCode::InvalidArgument, "grid density must be >= 64");
  QsReport best;
  if (h.is_rotation()) return best;
  for (int b = 0; b < 16; ++b) {
    const double beta = kTwoPi * b / 16;
    const double gb = h.lift(beta);
    auto line = [&](double x) {
      const double theta = kPi + 2.0 * std::atan(x);
      return std::tan(0.5 * (h.lift(theta + beta) - gb - kPi));
    };
    QsReport r = qs_constant_line(line, density);
    if (r.k_estimate > best.k_estimate || b == 0) {
      best = r;
    }
  }
  best.cayley_used = true;
  return best;
}

CircleMap compose(const CircleMap& a, const CircleMap& b) {
  const int m = std::max(a.size(), b.size());
  return CircleMap::from_lift([&](double t) { return a.lift(b.lift(t)); }, m);
}

CircleMap invert(const CircleMap& a) {
  return CircleMap::from_lift([&](double t) { return a.inverse_lift(t); }, a.size());
}

CircleMap reflect(const CircleMap& a) {
  return CircleMap::from_lift([&](double t) { return -a.lift(-t); }, a.size());
}

double sup_distance(const CircleMap& a, const CircleMap& b, int samples) {
  double d = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = kTwoPi * i / samples;
    d = std::max(d, std::abs(angle_difference(a.lift(t), b.lift(t))));
  }
  return d;
}

// ---------------------------------------------------------------------------

BeurlingAhlforsExtension::BeurlingAhlforsExtension(CircleMap h, int q)
    : h_(std::move(h)), base_(h_.basepoint_value()) {
  if (q < 2) throw Error(ErrorCode::InvalidArgument, "quadrature order too small");
  gauss_legendre(q, nodes_, weights_);
}

double BeurlingAhlforsExtension::line_map(double x) const {
  const double theta = kPi + 2.0 * std::atan(x);
  return std::tan(0.5 * (h_.lift(theta) - base_ - kPi));
}

double BeurlingAhlforsExtension::line_derivative(double x) const {
  const double theta = kPi + 2.0 * std::atan(x);
  const double c = std::cos(0.5 * (h_.lift(theta) - base_ - kPi));
  return h_.lift_derivative(theta) / ((1.0 + x * x) * c * c);
}

Jet BeurlingAhlforsExtension::half_plane_jet(Complex xi) const {
  const double x = xi.real();
  const double y = std::max(xi.imag(), 0.0);
  const double f0 = line_map(x);
  if (y <= 1e-10 * (1.0 + std::abs(x))) {
    const double fp = line_derivative(x);
    return {Complex{f0, 0.0}, fp, 0.0};
  }
  double alpha = 0.0, beta = 0.0;
  for (std::size_t q = 0; q < nodes_.size(); ++q) {
    alpha += weights_[q] * line_map(x + nodes_[q] * y);
    beta += weights_[q] * line_map(x - nodes_[q] * y);
  }
  const double fp = line_map(x + y), fm = line_map(x - y);
  const double ax = (fp - f0) / y, ay = (fp - alpha) / y;
  const double bx = (f0 - fm) / y, by = (fm - beta) / y;
  const Complex fx{0.5 * (ax + bx), ax - bx};
  const Complex fy{0.5 * (ay + by), ay - by};
  return {Complex{0.5 * (alpha + beta), alpha - beta}, 0.5 * (fx - kI * fy), 0.5 * (fx + kI * fy)};
}

Jet BeurlingAhlforsExtension::disk_jet(Complex z) const {
  const Complex rot = std::polar(1.0, base_);
  if (std::abs(z - 1.0) < 1e-12) return {rot, h_.lift_derivative(0.0) * rot, 0.0};
  const Complex om = 1.0 - z;
  const Complex xi = kI * (1.0 + z) / om;
  const Complex tp = 2.0 * kI / (om * om);
  const Jet f = half_plane_jet(xi);
  const Complex w = f.value;
  const Complex wi = w + kI;
  const Complex sp = 2.0 * kI / (wi * wi);
  return {rot * (w - kI) / wi, rot * sp * f.dz * tp, rot * sp * f.dzbar * std::conj(tp)};
}

Jet BeurlingAhlforsExtension::jet(Complex z) const {
  if (std::norm(z) <= 1.0) return disk_jet(z);
  const Complex zeta = 1.0 / std::conj(z);
  const Jet in = disk_jet(zeta);
  const Complex fc = std::conj(in.value);
  const Complex fc2 = fc * fc;
  return {1.0 / fc, std::conj(in.dz) / (z * z * fc2),
          std::conj(in.dzbar) / (std::conj(z) * std::conj(z) * fc2)};
}

Complex BeurlingAhlforsExtension::inverse(Complex w, double tol) const {
  const double r = std::abs(w);
  const Complex guess = r == 0.0 ? Complex{0.0} : std::polar(r, h_.inverse_lift(std::arg(w)));
  return invert_by_newton([this](Complex z) { return jet(z); }, w, guess, tol);
}

PlaneMap beurling_ahlfors_extend(const CircleMap& h, const GridSpec& grid) {
  grid.validate();
  const BeurlingAhlforsExtension ext(h);
  PlaneMap m{grid, std::vector<Complex>(grid.size()), Normalization::Custom, std::nullopt};
  for (int k = 0; k < grid.n; ++k)
    for (int j = 0; j < grid.n; ++j) {
      const Jet jt = ext.jet(grid.node(j, k));
      if (!(jt.jacobian() > 0.0) || !std::isfinite(jt.value.real()))
        throw Error(ErrorCode::ExtensionDegenerate, "extension Jacobian is not positive");
      m.values[grid.index(j, k)] = jt.value;
    }
  return m;
}

// ---------------------------------------------------------------------------

AnnulusInterpolation::AnnulusInterpolation(CircleMap inner, CircleMap outer, double r_in,
                                           double r_out)
    : inner_(std::move(inner)), outer_(std::move(outer)), r_inner_(r_in), r_outer_(r_out) {
  if (!(r_in > 0.0) || !(r_out > r_in))
    throw Error(ErrorCode::RadiiOrder, "annulus radii must satisfy 0 < r_in < r_out");
  offset_ = kTwoPi * std::round((outer_.lift(0.0) - inner_.lift(0.0)) / kTwoPi);
  if (outer_.lift(0.0) - offset_ - inner_.lift(0.0) <= -kPi) offset_ -= kTwoPi;
}

double AnnulusInterpolation::angle(double r, double theta) const {
  const double rr = std::clamp(r, r_inner_, r_outer_);
  const double s = std::log(rr / r_inner_) / std::log(r_outer_ / r_inner_);
  const double gi = inner_.lift(theta);
  return gi + s * (outer_.lift(theta) - offset_ - gi);
}

Jet AnnulusInterpolation::jet(Complex z) const {
  const double r = std::abs(z);
  if (r == 0.0) return {0.0, std::polar(1.0, inner_.lift(0.0)), 0.0};
  const double theta = wrap_angle(std::arg(z));
  const double rr = std::clamp(r, r_inner_, r_outer_);
  const double lr = std::log(r_outer_ / r_inner_);
  const double s = std::log(rr / r_inner_) / lr;
  const double gi = inner_.lift(theta), go = outer_.lift(theta) - offset_;
  const double G = gi + s * (go - gi);
  const double gi_t = inner_.lift_derivative(theta), go_t = outer_.lift_derivative(theta);
  const double Gt = gi_t + s * (go_t - gi_t);
  const double rGr = (r >= r_inner_ && r <= r_outer_) ? (go - gi) / lr : 0.0;
  const Complex a = 0.5 * std::polar(1.0, G - theta) * Complex{1.0 + Gt, rGr};
  const Complex b = 0.5 * std::polar(1.0, G + theta) * Complex{1.0 - Gt, rGr};
  return {std::polar(r, G), a, b};
}

Complex AnnulusInterpolation::inverse(Complex w) const {
  const double r = std::abs(w);
  if (r == 0.0) return 0.0;
  const double g0 = angle(r, 0.0);
  const double q = std::floor((std::arg(w) - g0) / kTwoPi);
  const double target = std::arg(w) - kTwoPi * q;
  double lo = 0.0, hi = kTwoPi;
  double t = target - g0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
    const double f = angle(r, t) - target;
    if (f == 0.0) break;
    if (f > 0.0) hi = t; else lo = t;
    const double rr = std::clamp(r, r_inner_, r_outer_);
    const double s = std::log(rr / r_inner_) / std::log(r_outer_ / r_inner_);
    const double fp = (1.0 - s) * inner_.lift_derivative(t) + s * outer_.lift_derivative(t);
    const double next = fp > 0.0 ? t - f / fp : 0.5 * (lo + hi);
    if (std::abs(next - t) < 1e-16) { t = next; break; }
    t = next;
  }
  return std::polar(r, t);
}

PlaneMap annulus_interpolation_extend(const CircleMap& inner, const CircleMap& outer,
                                      double r_in, double r_out, const GridSpec& grid) {
  grid.validate();
  const AnnulusInterpolation a(inner, outer, r_in, r_out);
  PlaneMap m{grid, std::vector<Complex>(grid.size(), Complex{kNaN, kNaN}), Normalization::Custom,
             std::nullopt};
  for (int k = 0; k < grid.n; ++k)
    for (int j = 0; j < grid.n; ++j) {
      const Complex z = grid.node(j, k);
      const double r = std::abs(z);
      if (r >= r_in && r <= r_out) m.values[grid.index(j, k)] = a(z);
    }
  return m;
}

std::string to_json(const CircleMap& h) {
  std::string s = "{\"m\":" + std::to_string(h.size()) + ",\"lift\":[";
  const auto& g = h.lift_samples();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) s += ',';
    s += format17(g[i]);
  }
  s += "],\"g2pi\":" + format17(g.front() + kTwoPi) + "}";
  return s;
}

CircleMap circle_map_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("circle map JSON: ") + e.what());
  }
  if (!j.contains("lift") || !j["lift"].is_array())
    throw Error(ErrorCode::InvalidArgument, "circle map JSON needs a lift array");
  std::vector<double> g = j["lift"].get<std::vector<double>>();
  if (j.contains("m") && j["m"].get<std::size_t>() != g.size())
    throw Error(ErrorCode::DimensionMismatch, "lift length differs from m");
  if (g.empty()) throw Error(ErrorCode::InvalidArgument, "empty lift");
  const double end = j.contains("g2pi") ? j["g2pi"].get<double>() : g.front() + kTwoPi;
  g.push_back(end);
  return CircleMap::from_samples(std::move(g));
}

}  // namespace qsweld
