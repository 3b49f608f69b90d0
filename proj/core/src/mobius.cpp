#include "qsweld/mobius.hpp"

namespace qsweld {

Complex Mobius::operator()(Complex z) const {
  if (is_infinite(z)) {
    if (c == Complex{0.0}) return kInfinity;
    return a / c;
  }
  const Complex den = c * z + d;
  if (den == Complex{0.0}) return kInfinity;
  return (a * z + b) / den;
}

Complex Mobius::derivative(Complex z) const {
  const Complex den = c * z + d;
  return (a * d - b * c) / (den * den);
}

Mobius Mobius::inverse() const { return {d, -b, -c, a}; }

Mobius Mobius::after(const Mobius& o) const {
  return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

Mobius Mobius::normalizing(Complex p1, Complex p2, Complex p3) {
  if (is_infinite(p1)) return {0.0, p2 - p3, 1.0, -p3};
  if (is_infinite(p2)) return {1.0, -p1, 1.0, -p3};
  if (is_infinite(p3)) return {1.0, -p1, 0.0, p2 - p1};
  return {p2 - p3, -p1 * (p2 - p3), p2 - p1, -p3 * (p2 - p1)};
}

Mobius Mobius::disk_automorphism(Complex a) { return {1.0, -a, -std::conj(a), 1.0}; }

Complex cross_ratio(Complex p1, Complex p2, Complex p3, Complex p4) {
  return Mobius::normalizing(p1, p2, p3)(p4);
}

std::vector<Complex> normalized_configuration(std::span<const Complex> points) {
  std::vector<Complex> out;
  if (points.empty()) return out;
  if (points.size() == 1) return {Complex{0.0}};
  if (points.size() == 2) return {Complex{0.0}, kInfinity};
  const Mobius m = Mobius::normalizing(points[0], points[1], points[2]);
  out.reserve(points.size());
  for (const Complex& p : points) out.push_back(m(p));
  // The first three are exact by construction.
  out[0] = 0.0;
  out[1] = 1.0;
  out[2] = kInfinity;
  return out;
}

}  // namespace qsweld
