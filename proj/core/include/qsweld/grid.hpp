#ifndef QSWELD_GRID_HPP
#define QSWELD_GRID_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qsweld/common.hpp"

namespace qsweld {

/// Uniform N x N sampling of the square [-L, L)^2. Node (j, k) sits at
/// x = -L + j h, y = -L + k h with h = 2L / N, so z = 0 is the node (N/2, N/2).
/// Storage is row-major with rows indexed by k (the y coordinate).
struct GridSpec {
  double half_width = 2.0;
  int n = 256;

  [[nodiscard]] double spacing() const { return 2.0 * half_width / n; }
  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(n) * n; }
  [[nodiscard]] std::size_t index(int j, int k) const {
    return static_cast<std::size_t>(k) * n + j;
  }
  [[nodiscard]] Complex node(int j, int k) const {
    const double h = spacing();
    return {-half_width + j * h, -half_width + k * h};
  }
  /// Fractional (column, row) coordinates of z.
  [[nodiscard]] std::pair<double, double> fractional_index(Complex z) const {
    const double h = spacing();
    return {(z.real() + half_width) / h, (z.imag() + half_width) / h};
  }
  /// Whether z lies in the sampled window [-L, L-h]^2.
  [[nodiscard]] bool contains(Complex z) const;
  /// Throws InvalidGrid unless L > 0, N >= 64 and N is a power of two.
  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Value and Wirtinger derivatives of a map at one point.
struct Jet {
  Complex value;
  Complex dz;
  Complex dzbar;

  [[nodiscard]] Complex mu() const { return dzbar / dz; }
  [[nodiscard]] double jacobian() const { return std::norm(dz) - std::norm(dzbar); }
};

/// Complex dilatation mu dz-bar/dz sampled on a grid; zero outside the disk
/// of `support_radius` around the origin and sup |mu| < 1.
struct BeltramiField {
  GridSpec grid;
  std::vector<Complex> values;
  double support_radius = 0.0;

  static BeltramiField zero(const GridSpec& grid);
  /// Zeroes samples outside `support_radius`; throws BudgetExceeded if any
  /// retained sample has modulus >= 1.
  static BeltramiField make(const GridSpec& grid, std::vector<Complex> values,
                            double support_radius);
  static BeltramiField from_function(const GridSpec& grid,
                                     const std::function<Complex(Complex)>& mu,
                                     double support_radius);

  [[nodiscard]] double sup_norm() const;
  [[nodiscard]] bool is_zero() const;
  /// Radius of the smallest origin-centred disk containing the nonzero samples.
  [[nodiscard]] double occupied_radius() const;
  /// Bilinear interpolation; zero outside the window.
  [[nodiscard]] Complex interpolate(Complex z) const;
};

/// Exterior expansion w(z) = scale (z + sum_k moments[k] z^{-k-1}) + shift,
/// valid for |z| > radius.
struct FarField {
  Complex scale{1.0};
  Complex shift{0.0};
  std::vector<Complex> moments;
  double radius = 0.0;

  [[nodiscard]] Jet jet(Complex z) const;
};

enum class Normalization : std::uint8_t { Fix01Inf, Custom };

/// A quasiconformal map sampled on a grid. Nodes outside the map's domain hold
/// NaN. Off-node evaluation is bicubic (Catmull-Rom); outside the window the
/// far-field expansion is used when one is attached.
struct PlaneMap {
  GridSpec grid;
  std::vector<Complex> values;
  Normalization normalization = Normalization::Custom;
  std::optional<FarField> far_field;

  static PlaneMap identity(const GridSpec& grid);
  static PlaneMap sample(const GridSpec& grid, const std::function<Complex(Complex)>& f,
                         Normalization tag = Normalization::Custom);

  [[nodiscard]] Complex operator()(Complex z) const { return jet(z).value; }
  /// Value and derivatives of the interpolant. NaN when the stencil touches an
  /// undefined node; throws OutOfWindow outside the window without far field.
  [[nodiscard]] Jet jet(Complex z) const;
  /// Solves f(z) = target by damped Newton iteration on the interpolant.
  /// Throws DegenerateJacobian if the iteration fails to converge.
  [[nodiscard]] Complex inverse(Complex target, Complex guess, double tol = 1e-12) const;
};

/// Newton inversion of a map given by its jet. Shared by analytic extensions
/// and grid maps.
Complex invert_by_newton(const std::function<Jet(Complex)>& f, Complex target,
                         Complex guess, double tol, int max_iter = 60);

}  // namespace qsweld

#endif  // QSWELD_GRID_HPP
