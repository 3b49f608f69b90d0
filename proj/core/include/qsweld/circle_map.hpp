#ifndef QSWELD_CIRCLE_MAP_HPP
#define QSWELD_CIRCLE_MAP_HPP

#include <functional>
#include <string>
#include <vector>

#include "qsweld/common.hpp"
#include "qsweld/grid.hpp"

namespace qsweld {

/// Orientation-preserving homeomorphism of the unit circle stored through a
/// lift g: [0, 2pi) -> R sampled at M uniform angles, with g(theta + 2pi) =
/// g(theta) + 2pi. Between samples the lift is a monotone cubic Hermite
/// interpolant, so the induced circle map stays injective.
class CircleMap {
 public:
  /// Validates and wraps the closed sample array g(2 pi i / M), i = 0..M
  /// (at least 16 values). The last value must exceed the first by 2pi to
  /// 1e-12 and is then dropped. Throws NonMonotone or WrongDegree.
  static CircleMap from_samples(std::vector<double> lift_samples);
  /// Samples a lift function at M uniform angles over one period; the
  /// function must satisfy g(theta + 2pi) = g(theta) + 2pi.
  static CircleMap from_lift(const std::function<double(double)>& lift, int samples);

  static CircleMap identity(int samples = 256);
  static CircleMap rotation(double alpha, int samples = 256);
  /// theta -> theta + amplitude * sin(frequency * theta + phase)
  static CircleMap sine(double amplitude, int samples, int frequency = 1, double phase = 0.0);
  /// Boundary values of z -> (z - a) / (1 - conj(a) z).
  static CircleMap disk_automorphism(Complex a, int samples);

  [[nodiscard]] int size() const { return static_cast<int>(lift_.size()); }
  [[nodiscard]] int degree() const { return 1; }
  [[nodiscard]] double basepoint_value() const { return lift_.front(); }
  [[nodiscard]] const std::vector<double>& lift_samples() const { return lift_; }

  /// Lift g at an arbitrary real angle.
  [[nodiscard]] double lift(double theta) const;
  [[nodiscard]] double lift_derivative(double theta) const;
  /// The lift of the inverse: the unique theta with g(theta) = phi.
  [[nodiscard]] double inverse_lift(double phi) const;
  /// e^{i theta} -> e^{i g(theta)}
  [[nodiscard]] Complex operator()(Complex z) const;
  [[nodiscard]] bool is_rotation(double tol = 1e-14) const;

 private:
  explicit CircleMap(std::vector<double> lift);

  std::vector<double> lift_;
  std::vector<double> slope_;
};

/// Quasisymmetry estimate over a finite (x, t) sample; a lower bound of the
/// true constant.
struct QsReport {
  double k_estimate = 1.0;
  struct {
    double x = 0.0;
    double t = 0.0;
  } worst_pair;
  bool cayley_used = false;
};

/// Sup of max(M, 1/M), M = (f(x+t) - f(x)) / (f(x) - f(x-t)), over the sample
/// x = -cot(pi j / D), j = 1..D-1 and t log-spaced in [2pi/D, pi] with eight
/// points per octave. Sample sets are nested under doubling of D.
QsReport qs_constant_line(const std::function<double(double)>& f, int grid_density);

/// Circle version: for sixteen base rotations beta the map is rotated so
/// that e^{i theta0} h(e^{i beta}) = e^{i beta}, conjugated to the line by
/// T(z) = i(1+z)/(1-z) and fed to the line estimator.
QsReport qs_constant(const CircleMap& h, int grid_density);

/// a o b, sampled at max(M_a, M_b) points.
CircleMap compose(const CircleMap& a, const CircleMap& b);
CircleMap invert(const CircleMap& a);
/// J o a o J with J(z) = 1/z; on the circle theta -> -g(-theta).
CircleMap reflect(const CircleMap& a);
/// sup over a fine sample of the circular distance between a and b.
double sup_distance(const CircleMap& a, const CircleMap& b, int samples = 4096);

/// Beurling-Ahlfors average extension of a circle homeomorphism to the closed
/// disk, conjugated through the Cayley transform. Points outside the disk are
/// handled by reflection in the unit circle, which yields a quasiconformal map
/// of the whole sphere with boundary values h.
class BeurlingAhlforsExtension {
 public:
  explicit BeurlingAhlforsExtension(CircleMap h, int quadrature_order = 32);

  [[nodiscard]] Jet jet(Complex z) const;
  [[nodiscard]] Complex operator()(Complex z) const { return jet(z).value; }
  /// Newton inversion seeded from the boundary values.
  [[nodiscard]] Complex inverse(Complex w, double tol = 1e-13) const;
  [[nodiscard]] const CircleMap& boundary() const { return h_; }

 private:
  [[nodiscard]] double line_map(double x) const;
  [[nodiscard]] double line_derivative(double x) const;
  [[nodiscard]] Jet half_plane_jet(Complex xi) const;
  [[nodiscard]] Jet disk_jet(Complex z) const;

  CircleMap h_;
  double base_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Samples the Beurling-Ahlfors extension on a grid (window nodes only).
/// Throws ExtensionDegenerate if the Jacobian fails to stay positive.
PlaneMap beurling_ahlfors_extend(const CircleMap& h, const GridSpec& grid);

/// W(r e^{i theta}) = r exp(i [g_in(theta) + s(r) (g_out(theta) - g_in(theta))])
/// with s(r) = log(r / r_in) / log(r_out / r_in). The outer lift is shifted by a
/// multiple of 2pi so that g_out(0) - g_in(0) lies in (-pi, pi].
class AnnulusInterpolation {
 public:
  AnnulusInterpolation(CircleMap inner, CircleMap outer, double r_inner, double r_outer);

  [[nodiscard]] double r_inner() const { return r_inner_; }
  [[nodiscard]] double r_outer() const { return r_outer_; }
  /// Angular lift G(r, theta); r is clamped to [r_inner, r_outer].
  [[nodiscard]] double angle(double r, double theta) const;
  /// Exact value and Wirtinger derivatives on the closed annulus.
  [[nodiscard]] Jet jet(Complex z) const;
  [[nodiscard]] Complex operator()(Complex z) const { return jet(z).value; }
  /// Radii are preserved, so inversion reduces to a monotone 1-D solve.
  [[nodiscard]] Complex inverse(Complex w) const;

 private:
  CircleMap inner_;
  CircleMap outer_;
  double r_inner_;
  double r_outer_;
  double offset_;
};

/// Samples the annulus interpolation on the grid; nodes off the closed annulus
/// hold NaN. Throws RadiiOrder unless 0 < r_inner < r_outer.
PlaneMap annulus_interpolation_extend(const CircleMap& inner, const CircleMap& outer,
                                      double r_inner, double r_outer, const GridSpec& grid);

/// {"m": M, "lift": [...], "g2pi": g0 + 2pi} with 17 significant digits.
std::string to_json(const CircleMap& h);
CircleMap circle_map_from_json(const std::string& text);

}  // namespace qsweld

#endif  // QSWELD_CIRCLE_MAP_HPP
