#include "qsweld/surfaces.hpp"
#include "support.hpp"

using namespace qsweld;

namespace {

std::vector<Complex> circle(Complex c, double r, int n = 512) {
  std::vector<Complex> p(n);
  for (int s = 0; s < n; ++s) p[s] = c + std::polar(r, kTwoPi * s / n);
  return p;
}

RiggedSurface four_holed() {
  return RiggedSurface::circle_domain({0.0, 1.0, true}, {{std::polar(0.5, kPi / 2), 0.12},
                                                         {std::polar(0.5, 7 * kPi / 6), 0.12},
                                                         {std::polar(0.5, -kPi / 6), 0.12}});
}

}  // namespace

TEST_CASE("modulus of round and Mobius annuli") {
  const double exact = std::log(2.0) / kTwoPi;
  CHECK(std::abs(modulus(circle(0.0, 0.5), circle(0.0, 1.0)) - exact) < 1e-10);
  // Mobius images of A(0.5, 1) with the pole outside: the modulus is invariant.
  const Mobius m{1.0, 0.3, 0.2, 1.0};
  std::vector<Complex> a, b;
  for (Complex z : circle(0.0, 0.5)) a.push_back(m(z));
  for (Complex z : circle(0.0, 1.0)) b.push_back(m(z));
  CHECK(std::abs(modulus(a, b) - exact) < 1e-8);
  // Eccentric annulus |z| < 1 minus |z - 0.2| <= 0.3, modulus via the Mobius
  // map that makes it concentric.
  const double c = 0.2, r = 0.3;
  const double x = ((1 + c * c - r * r) - std::sqrt(std::pow(1 + c * c - r * r, 2) - 4 * c * c)) / (2 * c);
  const Mobius t{1.0, -x, -x, 1.0};
  const double rho = std::abs(t(Complex{c + r, 0.0}));
  CHECK(std::abs(modulus(circle(c, r), circle(0.0, 1.0)) - std::log(1 / rho) / kTwoPi) < 1e-8);
  CHECK_THROWS_CODE(modulus(circle(3.0, 0.5), circle(0.0, 1.0)), ErrorCode::NonNested);
}

TEST_CASE("point in polygon") {
  const auto sq = std::vector<Complex>{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(point_in_polygon(sq, {0.5, 0.5}));
  CHECK_FALSE(point_in_polygon(sq, {1.5, 0.5}));
}

TEST_CASE("surface validation") {
  RiggedSurface s = four_holed();
  CHECK_NOTHROW(s.validate());
  CHECK(s.contains(0.0));
  CHECK_FALSE(s.contains(Complex{0.0, 0.5}));
  CHECK_FALSE(s.contains(Complex{2.0, 0.0}));
  RiggedSurface bad = s;
  bad.disks[2].center = bad.disks[1].center + 0.1;
  CHECK_THROWS_CODE(bad.validate(), ErrorCode::InvalidArgument);
  bad = s;
  bad.riggings.pop_back();
  CHECK_THROWS_CODE(bad.validate(), ErrorCode::InvalidArgument);
  CHECK_THROWS_CODE(RiggedSurface::annulus(1.0, 0.5, Orientation::Incoming, Orientation::Outgoing),
                    ErrorCode::RadiiOrder);
}

TEST_CASE("surface JSON round trip") {
  RiggedSurface s = four_holed();
  s.riggings[2] = CircleMap::sine(0.1, 64);
  s.orientations[1] = Orientation::Incoming;
  const RiggedSurface back = rigged_surface_from_json(to_json(s));
  REQUIRE(back.boundary_count() == 4);
  CHECK(back.disks[0].contains_infinity);
  CHECK(back.disks[2].center == s.disks[2].center);
  CHECK(back.orientations[1] == Orientation::Incoming);
  CHECK(sup_distance(back.riggings[2], s.riggings[2]) == 0.0);
  CHECK_FALSE(back.marking.has_value());
}

TEST_CASE("sewing annuli adds moduli") {
  const GridSpec g{4.0, 256};
  const auto x = RiggedSurface::annulus(0.5, 1.0, Orientation::Outgoing, Orientation::Outgoing);
  const auto y = RiggedSurface::annulus(1.0, 2.0, Orientation::Incoming, Orientation::Incoming);
  const SewnSurface s = sew(x, 1, y, 0, g);
  CHECK(s.atlas.h.is_rotation(1e-12));
  CHECK(s.boundaries.size() == 2);
  const auto inv = invariants(s, BeltramiField::zero(g));
  CHECK(std::abs(inv.at(0).real() - std::log(4.0) / kTwoPi) < 1e-3);
  CHECK_THROWS_CODE(sew(x, 1, x, 0, g), ErrorCode::OrientationMismatch);
  CHECK_THROWS_CODE(sew(y, 0, x, 1, g), ErrorCode::OrientationMismatch);
}

TEST_CASE("rotation riggings weld to a rotation") {
  const GridSpec g{4.0, 256};
  auto x = RiggedSurface::annulus(0.5, 1.0, Orientation::Outgoing, Orientation::Outgoing);
  auto y = RiggedSurface::annulus(1.0, 2.0, Orientation::Incoming, Orientation::Incoming);
  x.riggings[1] = CircleMap::rotation(0.4);
  y.riggings[0] = CircleMap::rotation(-1.3);
  const SewnSurface s = sew(x, 1, y, 0, g);
  CHECK(s.atlas.h.is_rotation(1e-12));
  CHECK(s.atlas.weld.residual < 1e-6);
  CHECK(s.atlas.chart_mismatch < 1e-6);
}

TEST_CASE("trivial caps leave the centres in place") {
  const GridSpec g{2.0, 128};
  RiggedSurface s = four_holed();
  for (int k = 1; k < 4; ++k) s.riggings[k] = CircleMap::rotation(0.3 * k);
  CHECK(cap_beltrami(s.disks[1], s.riggings[1], 0.5, s.disks[1].center + 0.05) == Complex{0.0});
  const PuncturedSurface p = sew_caps(s, g);
  CHECK(p.total_mu.is_zero());
  const auto inv = invariants(p);
  const Complex base = cross_ratio(kInfinity, s.disks[1].center, s.disks[2].center, s.disks[3].center);
  CHECK(std::abs(inv.at(0) - base) < 1e-12);
  // With the outer puncture at infinity the invariant is a ratio of centre differences.
  const Complex c1 = s.disks[1].center, c2 = s.disks[2].center, c3 = s.disks[3].center;
  CHECK(std::abs(base - (c1 - c2) / (c3 - c2)) < 1e-12);
}

TEST_CASE("caps agree with two-stage sewing") {
  const GridSpec g{4.0, 256};
  RiggedSurface x = four_holed();
  x.riggings[0] = CircleMap::sine(0.2, 256);
  const PuncturedSurface p = sew_caps(x, g);
  CHECK(p.total_mu.sup_norm() > 0.0);
  CHECK(p.total_mu.sup_norm() < 1.0);
  const Complex lambda = invariants(p).at(0);
  // Oracle: sew the outer boundary to the exterior of the unit disk and read
  // the hole centres through the seam chart.
  auto y = RiggedSurface::annulus(1.0, 100.0, Orientation::Incoming, Orientation::Incoming);
  y.disks.pop_back();
  y.orientations.pop_back();
  y.riggings.pop_back();
  x.orientations[0] = Orientation::Outgoing;
  const SewnSurface s = sew(x, 0, y, 0, GridSpec{4.0, 512});
  const Complex oracle = cross_ratio(kInfinity, s.realize(Side::X, x.disks[1].center),
                                     s.realize(Side::X, x.disks[2].center), s.realize(Side::X, x.disks[3].center));
  CHECK(std::abs(lambda - oracle) < 1e-3);
  CHECK(std::abs(lambda - cross_ratio(kInfinity, x.disks[1].center, x.disks[2].center, x.disks[3].center)) > 1e-3);
}

TEST_CASE("compose_beltrami matches the chain rule") {
  // f(z) = z + 0.2 zbar, T(z) = z + 0.1 z zbar: mu(f o T) from finite differences.
  const auto f = [](Complex z) { return z + 0.2 * std::conj(z); };
  const auto t = [](Complex z) { return z + 0.1 * z * std::conj(z); };
  const Complex z{0.3, -0.4};
  const Jet jt{t(z), 1.0 + 0.1 * std::conj(z), 0.1 * z};
  const double e = 1e-6;
  const auto fot = [&](Complex w) { return f(t(w)); };
  const Complex fx = (fot(z + e) - fot(z - e)) / (2 * e), fy = (fot(z + kI * e) - fot(z - kI * e)) / (2 * e);
  const Complex expected = (0.5 * (fx + kI * fy)) / (0.5 * (fx - kI * fy));
  CHECK(std::abs(compose_beltrami(0.2, jt) - expected) < 1e-8);
}

TEST_CASE("Dehn twist marking") {
  const GridSpec g{2.0, 256};
  const RiggedSurface x = four_holed();
  const RiggedSurface t = dehn_twist_boundary(x, 1, 0.5, g);
  REQUIRE(t.marking.has_value());
  CHECK(t.marking->sup_norm() > 0.1);
  CHECK(t.marking->sup_norm() < 1.0);
  // Support stays in the collar around boundary 1.
  const Disk& d = x.disks[1];
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j) {
      const Complex z = g.node(j, k);
      if (t.marking->values[g.index(j, k)] != Complex{0.0}) {
        CHECK(std::abs(z - d.center) > d.radius - 1e-12);
        CHECK(std::abs(z - d.center) < d.radius / 0.5 + g.spacing());
      }
    }
  CHECK_THROWS_CODE(dehn_twist_boundary(x, 1, 0.9, g), ErrorCode::CollarTooWide);
}
