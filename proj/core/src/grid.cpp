#include "qsweld/grid.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace qsweld {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Catmull-Rom weights for the stencil offsets -1, 0, 1, 2 and their derivatives.
std::array<double, 4> cr_weights(double t) {
  const double t2 = t * t, t3 = t2 * t;
  return {0.5 * (-t3 + 2.0 * t2 - t), 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
          0.5 * (-3.0 * t3 + 4.0 * t2 + t), 0.5 * (t3 - t2)};
}

std::array<double, 4> cr_slopes(double t) {
  const double t2 = t * t;
  return {0.5 * (-3.0 * t2 + 4.0 * t - 1.0), 0.5 * (9.0 * t2 - 10.0 * t),
          0.5 * (-9.0 * t2 + 8.0 * t + 1.0), 0.5 * (3.0 * t2 - 2.0 * t)};
}

}  // namespace

bool GridSpec::contains(Complex z) const {
  const double top = half_width - spacing();
  return z.real() >= -half_width && z.real() <= top && z.imag() >= -half_width &&
         z.imag() <= top;
}

void GridSpec::validate() const {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw Error(ErrorCode::InvalidGrid, "half width must be positive");
  if (n < 64 || (n & (n - 1)) != 0)
    throw Error(ErrorCode::InvalidGrid, "N must be a power of two >= 64");
}

BeltramiField BeltramiField::zero(const GridSpec& grid) {
  grid.validate();
  return {grid, std::vector<Complex>(grid.size(), Complex{0.0}), 0.0};
}

BeltramiField BeltramiField::make(const GridSpec& grid, std::vector<Complex> values,
                                  double support_radius) {
  grid.validate();
  if (values.size() != grid.size())
    throw Error(ErrorCode::DimensionMismatch, "Beltrami samples do not match the grid");
  for (int k = 0; k < grid.n; ++k) {
    for (int j = 0; j < grid.n; ++j) {
      Complex& v = values[grid.index(j, k)];
      if (std::abs(grid.node(j, k)) > support_radius) {
        v = 0.0;
        continue;
      }
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw Error(ErrorCode::InvalidArgument, "non-finite Beltrami sample");
      if (std::abs(v) >= 1.0)
        throw Error(ErrorCode::BudgetExceeded, "Beltrami coefficient reaches modulus 1");
    }
  }
  return {grid, std::move(values), support_radius};
}

BeltramiField BeltramiField::from_function(const GridSpec& grid,
                                           const std::function<Complex(Complex)>& mu,
                                           double support_radius) {
  grid.validate();
  std::vector<Complex> v(grid.size(), Complex{0.0});
  for (int k = 0; k < grid.n; ++k)
    for (int j = 0; j < grid.n; ++j) {
      const Complex z = grid.node(j, k);
      if (std::abs(z) <= support_radius) v[grid.index(j, k)] = mu(z);
    }
  return make(grid, std::move(v), support_radius);
}

double BeltramiField::sup_norm() const {
  double m = 0.0;
  for (const Complex& v : values) m = std::max(m, std::abs(v));
  return m;
}

bool BeltramiField::is_zero() const {
  return std::all_of(values.begin(), values.end(), [](Complex v) { return v == Complex{0.0}; });
}

double BeltramiField::occupied_radius() const {
  double r = 0.0;
  for (int k = 0; k < grid.n; ++k)
    for (int j = 0; j < grid.n; ++j)
      if (values[grid.index(j, k)] != Complex{0.0}) r = std::max(r, std::abs(grid.node(j, k)));
  return r;
}

Complex BeltramiField::interpolate(Complex z) const {
  const auto [u, v] = grid.fractional_index(z);
  const int j = static_cast<int>(std::floor(u));
  const int k = static_cast<int>(std::floor(v));
  if (j < 0 || k < 0 || j + 1 >= grid.n || k + 1 >= grid.n) return 0.0;
  const double s = u - j, t = v - k;
  return (1 - s) * (1 - t) * values[grid.index(j, k)] + s * (1 - t) * values[grid.index(j + 1, k)] +
         (1 - s) * t * values[grid.index(j, k + 1)] + s * t * values[grid.index(j + 1, k + 1)];
}

Jet FarField::jet(Complex z) const {
  Complex sum = z, dsum = 1.0;
  const Complex inv = 1.0 / z;
  Complex p = inv;  // z^{-k-1}
  for (std::size_t k = 0; k < moments.size(); ++k) {
    sum += moments[k] * p;
    dsum -= static_cast<double>(k + 1) * moments[k] * p * inv;
    p *= inv;
  }
  return {scale * sum + shift, scale * dsum, 0.0};
}

PlaneMap PlaneMap::identity(const GridSpec& grid) {
  PlaneMap m = sample(grid, [](Complex z) { return z; }, Normalization::Fix01Inf);
  m.far_field = FarField{};
  return m;
}

PlaneMap PlaneMap::sample(const GridSpec& grid, const std::function<Complex(Complex)>& f,
                          Normalization tag) {
  grid.validate();
  PlaneMap m{grid, std::vector<Complex>(grid.size()), tag, std::nullopt};
  for (int k = 0; k < grid.n; ++k)
    for (int j = 0; j < grid.n; ++j) m.values[grid.index(j, k)] = f(grid.node(j, k));
  return m;
}

Jet PlaneMap::jet(Complex z) const {
  const auto [u, v] = grid.fractional_index(z);
  const int j0 = static_cast<int>(std::floor(u));
  const int k0 = static_cast<int>(std::floor(v));
  const bool inside = std::isfinite(u) && std::isfinite(v) && j0 >= 1 && k0 >= 1 &&
                      j0 + 2 < grid.n && k0 + 2 < grid.n;
  if (!inside) {
    if (far_field && std::abs(z) > far_field->radius) return far_field->jet(z);
    throw Error(ErrorCode::OutOfWindow, "point outside the sampled window");
  }
  const double s = u - j0, t = v - k0;
  const auto wx = cr_weights(s), dx = cr_slopes(s);
  const auto wy = cr_weights(t), dy = cr_slopes(t);
  Complex f{0.0}, fx{0.0}, fy{0.0};
  for (int b = 0; b < 4; ++b) {
    Complex row{0.0}, drow{0.0};
    const std::size_t base = grid.index(j0 - 1, k0 - 1 + b);
    for (int a = 0; a < 4; ++a) {
      row += wx[a] * values[base + a];
      drow += dx[a] * values[base + a];
    }
    f += wy[b] * row;
    fx += wy[b] * drow;
    fy += dy[b] * row;
  }
  const double h = grid.spacing();
  fx /= h;
  fy /= h;
  return {f, 0.5 * (fx - kI * fy), 0.5 * (fx + kI * fy)};
}

Complex PlaneMap::inverse(Complex target, Complex guess, double tol) const {
  return invert_by_newton([this](Complex z) { return jet(z); }, target, guess, tol);
}

Complex invert_by_newton(const std::function<Jet(Complex)>& f, Complex target, Complex guess,
                         double tol, int max_iter) {
  Complex z = guess;
  Jet j = f(z);
  double res = std::abs(target - j.value);
  const double goal = tol * (1.0 + std::abs(target));
  for (int it = 0; it < max_iter; ++it) {
    if (res <= goal) return z;
    const double jac = j.jacobian();
    if (!(jac > 0.0)) throw Error(ErrorCode::DegenerateJacobian, "non-positive Jacobian");
    const Complex r = target - j.value;
    const Complex step = (std::conj(j.dz) * r - j.dzbar * std::conj(r)) / jac;
    double lambda = 1.0;
    bool improved = false;
    for (int damp = 0; damp < 30; ++damp) {
      const Complex cand = z + lambda * step;
      const Jet jc = f(cand);
      const double rc = std::abs(target - jc.value);
      if (std::isfinite(rc) && rc < res) {
        z = cand;
        j = jc;
        res = rc;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) break;
  }
  if (res <= goal) return z;
  // Rounding floor: accept if within a few ulps of the target's scale.
  if (res <= 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(target))) return z;
  throw Error(ErrorCode::DegenerateJacobian, "Newton inversion did not converge");
}

}  // namespace qsweld
