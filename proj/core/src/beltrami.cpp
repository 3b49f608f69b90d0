#include "qsweld/beltrami.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstdlib>
#include <mutex>
#include <sstream>

namespace qsweld {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place square complex FFT of side P with planner calls serialized.
class Fft2 {
 public:
  explicit Fft2(int p) : p_(p) {
    data_ = fftw_alloc_complex(static_cast<std::size_t>(p) * p);
    std::lock_guard lock(planner_mutex());
    static std::once_flag once;
    std::call_once(once, [] { fftw_init_threads(); });
    fftw_plan_with_nthreads(fft_threads());
    fwd_ = fftw_plan_dft_2d(p, p, data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_2d(p, p, data_, data_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft2() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(data_);
  }
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;

  Complex* data() { return reinterpret_cast<Complex*>(data_); }
  void forward() { fftw_execute(fwd_); }
  void backward() { fftw_execute(bwd_); }

 private:
  int p_;
  fftw_complex* data_;
  fftw_plan fwd_{};
  fftw_plan bwd_{};
};

long double corner_primitive(long double x, long double y) {
  const long double r2 = x * x + y * y;
  long double v = 0.0L;
  if (r2 > 0.0L && y != 0.0L) v += 0.5L * y * std::log(r2);
  if (x != 0.0L) v += x * std::atan(y / x);
  return v;
}

// (1/pi) * integral of dA/u over the h-cell centred at d.
Complex cauchy_cell(double dx, double dy, double h) {
  const long double a = 0.5L * h;
  const long double x1 = dx - a, x2 = dx + a, y1 = dy - a, y2 = dy + a;
  const long double re = corner_primitive(x2, y2) - corner_primitive(x1, y2) -
                         corner_primitive(x2, y1) + corner_primitive(x1, y1);
  const long double im = corner_primitive(y2, x2) - corner_primitive(y1, x2) -
                         corner_primitive(y2, x1) + corner_primitive(y1, x1);
  return {static_cast<double>(re / std::numbers::pi_v<long double>),
          static_cast<double>(-im / std::numbers::pi_v<long double>)};
}

bool is_node(const GridSpec& g, Complex z, int& j, int& k) {
  const auto [u, v] = g.fractional_index(z);
  j = static_cast<int>(std::lround(u));
  k = static_cast<int>(std::lround(v));
  return std::abs(u - j) < 1e-12 && std::abs(v - k) < 1e-12 && j >= 0 && k >= 0 && j < g.n &&
         k < g.n;
}

}  // namespace

int fft_threads() {
  if (const char* env = std::getenv("QSWELD_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

PlaneMap solve_beltrami(const BeltramiField& mu, double tol, int max_iter, SolveStats* stats) {
  const GridSpec& g = mu.grid;
  g.validate();
  if (mu.values.size() != g.size())
    throw Error(ErrorCode::DimensionMismatch, "Beltrami samples do not match the grid");
  const double k = mu.sup_norm();
  if (k > 0.95) throw Error(ErrorCode::BudgetExceeded, "sup|mu| exceeds the solver budget 0.95");
  if (mu.occupied_radius() > 0.5 * g.half_width + 1e-12)
    throw Error(ErrorCode::BudgetExceeded, "support of mu exceeds half the window");
  if (stats) *stats = {};
  if (mu.is_zero()) return PlaneMap::identity(g);

  const int n = g.n, p = 2 * n;
  const double h = g.spacing();
  const std::size_t pp = static_cast<std::size_t>(p) * p;
  Fft2 fft(p);
  Complex* buf = fft.data();

  auto wave = [p](int i) { return i < p / 2 ? i : i - p; };
  std::vector<Complex> beurling(pp);
  for (int q = 0; q < p; ++q)
    for (int i = 0; i < p; ++i) {
      const Complex kappa(wave(i), wave(q));
      beurling[static_cast<std::size_t>(q) * p + i] =
          (i == 0 && q == 0) ? Complex{0.0} : std::conj(kappa) / kappa / static_cast<double>(pp);
    }

  std::vector<std::size_t> support;
  for (std::size_t idx = 0; idx < g.size(); ++idx)
    if (mu.values[idx] != Complex{0.0}) support.push_back(idx);

  auto pad = [&](std::size_t idx) {
    return (idx / n) * static_cast<std::size_t>(p) + idx % n;
  };

  std::vector<Complex> phi(g.size(), Complex{0.0});
  for (std::size_t idx : support) phi[idx] = mu.values[idx];

  double residual = 0.0;
  int it = 0;
  for (;; ++it) {
    std::fill(buf, buf + pp, Complex{0.0});
    for (std::size_t idx : support) buf[pad(idx)] = phi[idx];
    fft.forward();
    for (std::size_t i = 0; i < pp; ++i) buf[i] *= beurling[i];
    fft.backward();
    double num = 0.0, den = 0.0;
    for (std::size_t idx : support) {
      const Complex one_s = 1.0 + buf[pad(idx)];
      const Complex next = mu.values[idx] * one_s;
      num += std::norm(phi[idx] - next);
      den += std::norm(one_s);
      phi[idx] = next;
    }
    residual = std::sqrt(num / den);
    if (residual < tol) break;
    if (it + 1 >= max_iter) {
      std::ostringstream os;
      os << "residual " << residual << " after " << max_iter << " iterations";
      throw Error(ErrorCode::NoConvergence, os.str());
    }
  }
  if (stats) *stats = {it + 1, residual};

  // Cauchy transform by aperiodic convolution.
  std::vector<Complex> kernel_hat(pp);
  for (int q = 0; q < p; ++q)
    for (int i = 0; i < p; ++i) {
      const int di = i < n ? i : i - p;
      const int dq = q < n ? q : q - p;
      buf[static_cast<std::size_t>(q) * p + i] = cauchy_cell(di * h, dq * h, h);
    }
  fft.forward();
  for (std::size_t i = 0; i < pp; ++i) kernel_hat[i] = buf[i] / static_cast<double>(pp);

  std::fill(buf, buf + pp, Complex{0.0});
  for (std::size_t idx : support) buf[pad(idx)] = phi[idx];
  fft.forward();
  for (std::size_t i = 0; i < pp; ++i) buf[i] *= kernel_hat[i];
  fft.backward();

  std::vector<Complex> raw(g.size());
  for (int kk = 0; kk < n; ++kk)
    for (int j = 0; j < n; ++j) {
      const std::size_t idx = g.index(j, kk);
      raw[idx] = g.node(j, kk) + buf[pad(idx)];
    }

  auto raw_at = [&](Complex z) {
    int j, kk;
    if (is_node(g, z, j, kk)) return raw[g.index(j, kk)];
    Complex s = z;
    for (std::size_t idx : support) {
      const Complex d = z - g.node(static_cast<int>(idx % n), static_cast<int>(idx / n));
      s += phi[idx] * cauchy_cell(d.real(), d.imag(), h);
    }
    return s;
  };
  const Complex a = raw_at(0.0);
  const Complex b = raw_at(1.0);
  const Complex scale = 1.0 / (b - a);

  PlaneMap w{g, std::vector<Complex>(g.size()), Normalization::Fix01Inf, std::nullopt};
  for (std::size_t idx = 0; idx < g.size(); ++idx) w.values[idx] = (raw[idx] - a) * scale;
  {
    int j, kk;
    if (is_node(g, 0.0, j, kk)) w.values[g.index(j, kk)] = 0.0;
    if (is_node(g, 1.0, j, kk)) w.values[g.index(j, kk)] = 1.0;
  }

  FarField ff;
  ff.scale = scale;
  ff.shift = -a * scale;
  ff.radius = 2.0 * mu.occupied_radius() + 2.0 * h;
  constexpr int kMoments = 32;
  ff.moments.assign(kMoments, Complex{0.0});
  for (std::size_t idx : support) {
    const Complex zeta = g.node(static_cast<int>(idx % n), static_cast<int>(idx / n));
    Complex pw = phi[idx] * (h * h / kPi);
    for (int m = 0; m < kMoments; ++m) {
      ff.moments[m] += pw;
      pw *= zeta;
    }
  }
  w.far_field = std::move(ff);
  return w;
}

BeltramiField dilatation(const PlaneMap& f) {
  const GridSpec& g = f.grid;
  g.validate();
  const int n = g.n;
  const double h = g.spacing();
  BeltramiField out{g, std::vector<Complex>(g.size(), Complex{0.0}), g.half_width * std::sqrt(2.0)};
  for (int k = 2; k < n - 2; ++k)
    for (int j = 2; j < n - 2; ++j) {
      const Complex e = f.values[g.index(j + 1, k)], wv = f.values[g.index(j - 1, k)];
      const Complex nn = f.values[g.index(j, k + 1)], s = f.values[g.index(j, k - 1)];
      const Complex fx = (e - wv) / (2.0 * h), fy = (nn - s) / (2.0 * h);
      const Complex dz = 0.5 * (fx - kI * fy), dzb = 0.5 * (fx + kI * fy);
      if (!std::isfinite(std::norm(dz)) || !std::isfinite(std::norm(dzb))) continue;
      if (std::abs(dz) < 1e-12 || std::norm(dz) - std::norm(dzb) <= 0.0)
        throw Error(ErrorCode::DegenerateJacobian, "map is not orientation preserving on the grid");
      out.values[g.index(j, k)] = dzb / dz;
    }
  return out;
}

double maximal_dilatation(double k) { return (1.0 + k) / (1.0 - k); }

double maximal_dilatation(const BeltramiField& mu) { return maximal_dilatation(mu.sup_norm()); }

double teichmuller_distance_upper(const BeltramiField& f_mu, const BeltramiField& g_mu) {
  if (!(f_mu.grid == g_mu.grid))
    throw Error(ErrorCode::DimensionMismatch, "fields live on different grids");
  double k = 0.0;
  for (std::size_t i = 0; i < f_mu.values.size(); ++i) {
    const Complex a = f_mu.values[i], b = g_mu.values[i];
    k = std::max(k, std::abs(b - a) / std::abs(1.0 - std::conj(a) * b));
  }
  return 0.5 * std::log(maximal_dilatation(k));
}

PlaneMap normalize01(const PlaneMap& w) {
  int j, k;
  const Complex a = is_node(w.grid, 0.0, j, k) ? w.values[w.grid.index(j, k)] : w(0.0);
  const Complex b = is_node(w.grid, 1.0, j, k) ? w.values[w.grid.index(j, k)] : w(1.0);
  const Complex s = 1.0 / (b - a);
  PlaneMap out = w;
  for (Complex& v : out.values) v = (v - a) * s;
  if (out.far_field) {
    out.far_field->scale *= s;
    out.far_field->shift = (out.far_field->shift - a) * s;
  }
  out.normalization = Normalization::Fix01Inf;
  return out;
}

}  // namespace qsweld
