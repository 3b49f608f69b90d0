#include "qsweld/welding.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <sstream>

namespace qsweld {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// c_n = (1/M) sum_m v_m e^{-i n theta_m} for n in [lo, hi].
std::vector<Complex> circle_coefficients(const std::vector<Complex>& v, int lo, int hi) {
  const int m = static_cast<int>(v.size());
  std::vector<Complex> c(hi - lo + 1, Complex{0.0});
  for (int n = lo; n <= hi; ++n) {
    Complex s{0.0};
    for (int k = 0; k < m; ++k) {
      // Exact reduction of n k mod m keeps the twiddles accurate.
      const long long e = (static_cast<long long>(n) * k) % m;
      s += v[k] * std::polar(1.0, -kTwoPi * static_cast<double>(e) / m);
    }
    c[n - lo] = s / static_cast<double>(m);
  }
  return c;
}

bool segments_cross(Complex p1, Complex p2, Complex q1, Complex q2) {
  auto cross = [](Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); };
  const double d1 = cross(p2 - p1, q1 - p1), d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1), d4 = cross(q2 - q1, p2 - q1);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

std::vector<Complex> subsample(const std::vector<Complex>& p, std::size_t target) {
  if (p.size() <= target) return p;
  std::vector<Complex> out(target);
  for (std::size_t i = 0; i < target; ++i) out[i] = p[i * p.size() / target];
  return out;
}

}  // namespace

Jet InteriorSeries::jet(Complex z) const {
  Complex v{0.0}, d{0.0};
  for (std::size_t n = a.size(); n-- > 0;) {
    d = d * z + v;
    v = v * z + a[n];
  }
  return {v, d, 0.0};
}

Jet ExteriorSeries::jet(Complex z) const {
  const Complex u = 1.0 / z;
  Complex v{0.0}, d{0.0};  // polynomial in u and its u-derivative
  for (std::size_t n = b.size(); n-- > 0;) {
    d = d * u + v;
    v = v * u + b[n];
  }
  return {lead * z + v, lead - d * u * u, 0.0};
}

Complex WeldingResult::F_inverse(Complex target, Complex guess) const {
  return invert_by_newton([this](Complex z) { return F_jet(z); }, target, guess, 1e-13);
}

Complex WeldingResult::G_inverse(Complex target, Complex guess) const {
  return invert_by_newton([this](Complex z) { return G_jet(z); }, target, guess, 1e-13);
}

WeldingResult weld_diagnostic(const CircleMap& h, const GridSpec& grid, const WeldOptions& opt) {
  grid.validate();
  if (grid.half_width < 2.0)
    throw Error(ErrorCode::BudgetExceeded, "welding needs a window with L >= 2");
  WeldingResult res;
  res.qs_estimate = qs_constant(h, 256).k_estimate;
  if (res.qs_estimate >= 50.0)
    throw Error(ErrorCode::BudgetExceeded, "quasisymmetry estimate above the welding budget 50");

  const BeurlingAhlforsExtension H(invert(h));
  std::vector<Complex> mu(grid.size(), Complex{0.0});
  for (int k = 0; k < grid.n; ++k)
    for (int j = 0; j < grid.n; ++j) {
      const Complex z = grid.node(j, k);
      if (std::norm(z) < 1.0) {
        const Jet jt = H.jet(z);
        if (!(jt.jacobian() > 0.0))
          throw Error(ErrorCode::ExtensionDegenerate, "extension Jacobian is not positive");
        mu[grid.index(j, k)] = jt.mu();
      }
    }
  const BeltramiField field = BeltramiField::make(grid, std::move(mu), 1.0);
  res.mu_sup = field.sup_norm();
  res.w = solve_beltrami(field, opt.solve_tol, opt.max_iter, &res.stats);
  const PlaneMap& w = res.w;

  const double hstep = grid.spacing();
  const double r_in = 1.0 - opt.fit_offset * hstep;
  const double r_out = 1.0 + opt.fit_offset * hstep;
  const int m = opt.fit_samples;
  const int terms = m / 4;
  std::vector<Complex> fin(m), gout(m);
  for (int i = 0; i < m; ++i) {
    const double t = kTwoPi * i / m;
    fin[i] = w(H.inverse(std::polar(r_in, t)));
    gout[i] = w(std::polar(r_out, t));
  }
  // Coefficients on the wrong side of the spectrum are pure discretization
  // noise for a holomorphic map; the series is truncated where the kept side
  // sinks into that floor, which keeps r^{-n} from amplifying it.
  auto noise_floor = [](const std::vector<Complex>& c, int lo, int hi) {
    double s2 = 0.0;
    for (int i = lo; i <= hi; ++i) s2 += std::norm(c[i]);
    return std::sqrt(s2 / (hi - lo + 1));
  };
  const auto cf = circle_coefficients(fin, -terms, terms);
  const double f_floor = noise_floor(cf, 0, terms / 2);  // frequencies -terms..-terms/2
  res.f_series.a.clear();
  for (int n = 0; n <= terms; ++n) {
    const Complex c = cf[terms + n];
    if (n >= 2 && std::abs(c) < 4.0 * f_floor) break;
    res.f_series.a.push_back(c / std::pow(r_in, n));
  }
  const auto cg = circle_coefficients(gout, -terms, terms);
  const double g_floor = noise_floor(cg, terms + terms / 2, 2 * terms);  // terms/2..terms
  res.g_series.lead = cg[terms + 1] / r_out;
  res.g_series.b.clear();
  for (int n = 0; n <= terms; ++n) {
    const Complex c = cg[terms - n];
    if (n >= 2 && std::abs(c) < 4.0 * g_floor) break;
    res.g_series.b.push_back(c * std::pow(r_out, n));
  }

  res.F = PlaneMap{grid, std::vector<Complex>(grid.size(), Complex{kNaN, kNaN}),
                   Normalization::Fix01Inf, std::nullopt};
  res.G = res.F;
  res.G.far_field = w.far_field;
  for (int k = 0; k < grid.n; ++k)
    for (int j = 0; j < grid.n; ++j) {
      const Complex z = grid.node(j, k);
      const std::size_t idx = grid.index(j, k);
      if (std::norm(z) <= 1.0) res.F.values[idx] = w(H.inverse(z));
      if (std::norm(z) >= 1.0) res.G.values[idx] = w.values[idx];
    }

  const int s = opt.seam_samples;
  res.seam.resize(s);
  for (int i = 0; i < s; ++i) res.seam[i] = res.G_at(std::polar(1.0, kTwoPi * i / s));
  res.residual = welding_residual(res, h, s);
  return res;
}

WeldingResult weld(const CircleMap& h, const GridSpec& grid, double tol, const WeldOptions& opt) {
  WeldingResult res = weld_diagnostic(h, grid, opt);
  if (!(res.residual < tol)) {
    std::ostringstream os;
    os << "welding residual " << res.residual << " exceeds " << tol;
    throw Error(ErrorCode::ResidualTooLarge, os.str());
  }
  return res;
}

double welding_residual(const WeldingResult& r, const CircleMap& h, int samples) {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = kTwoPi * i / samples;
    const Complex expected = std::polar(1.0, h.lift(t));
    const Complex z = r.G_inverse(r.F_at(std::polar(1.0, t)), expected);
    worst = std::max(worst, std::abs(z - expected));
  }
  return worst;
}

double turning_constant(const std::vector<Complex>& p) {
  const int s = static_cast<int>(p.size());
  double sup = 1.0;
  for (int a = 0; a < s; ++a)
    for (int c = a + 1; c < s; ++c) {
      const double dac = std::abs(p[a] - p[c]);
      if (dac == 0.0) return std::numeric_limits<double>::infinity();
      double m1 = 1.0, m2 = 1.0;
      for (int b = a + 1; b < c; ++b)
        m1 = std::max(m1, (std::abs(p[a] - p[b]) + std::abs(p[b] - p[c])) / dac);
      // Only min(m1, m2) matters, so the second arc can stop early.
      for (int b = c + 1; b < s + a && m2 < m1; ++b) {
        const Complex& pb = p[b % s];
        m2 = std::max(m2, (std::abs(p[a] - pb) + std::abs(pb - p[c])) / dac);
      }
      sup = std::max(sup, std::min(m1, m2));
    }
  return sup;
}

bool self_intersects(const std::vector<Complex>& p) {
  const int s = static_cast<int>(p.size());
  for (int i = 0; i < s; ++i) {
    const Complex a1 = p[i], a2 = p[(i + 1) % s];
    for (int j = i + 2; j < s; ++j) {
      if (i == 0 && j == s - 1) continue;
      if (segments_cross(a1, a2, p[j], p[(j + 1) % s])) return true;
    }
  }
  return false;
}

QuasicircleReport quasicircle_check(const std::vector<Complex>& seam) {
  if (seam.size() < 64) throw Error(ErrorCode::InvalidArgument, "quasicircle check needs >= 64 points");
  if (self_intersects(seam)) throw Error(ErrorCode::SelfIntersecting, "seam polyline crosses itself");
  const auto fine = subsample(seam, 512);
  const auto coarse = subsample(fine, fine.size() / 2);
  QuasicircleReport r;
  r.turning_constant = turning_constant(fine);
  const double c = turning_constant(coarse);
  r.refinement_stable = std::abs(r.turning_constant - c) < 0.1 * c;
  return r;
}

CircleFit fit_circle(const std::vector<Complex>& pts) {
  const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex p = pts[i];
    a(i, 0) = p.real();
    a(i, 1) = p.imag();
    a(i, 2) = 1.0;
    b(i) = -std::norm(p);
  }
  const Eigen::Vector3d x = a.colPivHouseholderQr().solve(b);
  CircleFit f;
  f.center = {-0.5 * x(0), -0.5 * x(1)};
  f.radius = std::sqrt(std::max(0.0, std::norm(f.center) - x(2)));
  for (const Complex& p : pts)
    f.max_deviation = std::max(f.max_deviation, std::abs(std::abs(p - f.center) - f.radius));
  return f;
}

}  // namespace qsweld
