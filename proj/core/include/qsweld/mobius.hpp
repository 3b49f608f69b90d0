#ifndef QSWELD_MOBIUS_HPP
#define QSWELD_MOBIUS_HPP

#include <limits>
#include <span>
#include <vector>

#include "qsweld/common.hpp"

namespace qsweld {

/// The point at infinity of the Riemann sphere in the chart C.
inline const Complex kInfinity{std::numeric_limits<double>::infinity(), 0.0};

inline bool is_infinite(Complex z) { return std::isinf(z.real()) || std::isinf(z.imag()); }

/// z -> (a z + b) / (c z + d) acting on the Riemann sphere.
struct Mobius {
  Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

  [[nodiscard]] Complex operator()(Complex z) const;
  /// Complex derivative at a finite point whose image is finite.
  [[nodiscard]] Complex derivative(Complex z) const;
  [[nodiscard]] Mobius inverse() const;
  /// (*this) o other
  [[nodiscard]] Mobius after(const Mobius& other) const;

  static Mobius identity() { return {}; }
  static Mobius affine(Complex scale, Complex shift) { return {scale, shift, 0.0, 1.0}; }
  /// J(z) = 1/z
  static Mobius reciprocal() { return {0.0, 1.0, 1.0, 0.0}; }
  /// Sends p1 -> 0, p2 -> 1, p3 -> infinity. Points may be infinite.
  static Mobius normalizing(Complex p1, Complex p2, Complex p3);
  /// Disk automorphism (z - a) / (1 - conj(a) z).
  static Mobius disk_automorphism(Complex a);
};

/// Cross-ratio normalised so that (0, 1, inf, lambda) -> lambda.
Complex cross_ratio(Complex p1, Complex p2, Complex p3, Complex p4);

/// Positions of the marked points after sending the first three to 0, 1, inf.
/// Fewer than three points are normalised to the leading entries of (0, inf, 1)
/// for two points and (0) for one point.
std::vector<Complex> normalized_configuration(std::span<const Complex> points);

}  // namespace qsweld

#endif  // QSWELD_MOBIUS_HPP
