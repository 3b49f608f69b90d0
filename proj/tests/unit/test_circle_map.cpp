#include <random>

#include "qsweld/circle_map.hpp"
#include "qsweld/mobius.hpp"
#include "support.hpp"

using namespace qsweld;

TEST_CASE("from_samples validates the closed lift") {
  std::vector<double> ok(17);
  for (int i = 0; i <= 16; ++i) ok[i] = kTwoPi * i / 16;
  CHECK(CircleMap::from_samples(ok).size() == 16);

  auto bad = ok;
  bad[5] = bad[4];
  CHECK_THROWS_CODE(CircleMap::from_samples(bad), ErrorCode::NonMonotone);
  bad = ok;
  bad.back() += 0.5;
  CHECK_THROWS_CODE(CircleMap::from_samples(bad), ErrorCode::WrongDegree);
  CHECK_THROWS(CircleMap::from_samples(std::vector<double>(8, 0.0)));
}

TEST_CASE("lift, inverse and circle action agree") {
  const CircleMap h = CircleMap::sine(0.3, 256, 2, 0.4);
  for (int i = 0; i < 40; ++i) {
    const double th = -3.0 + 0.17 * i;
    const double g = h.lift(th);
    CHECK(std::abs(h.lift(th + kTwoPi) - g - kTwoPi) < 1e-12);
    CHECK(std::abs(h.inverse_lift(g) - th) < 1e-10);
    CHECK(std::abs(h(std::polar(1.0, th)) - std::polar(1.0, g)) < 1e-12);
    // Interpolant of a smooth lift: accurate to the sampling order.
    CHECK(std::abs(g - (th + 0.3 * std::sin(2 * th + 0.4))) < 1e-5);
  }
}

TEST_CASE("compose, invert and reflect") {
  const CircleMap h = CircleMap::sine(0.4, 512);
  CHECK(sup_distance(compose(h, invert(h)), CircleMap::identity(512)) < 1e-6);
  CHECK(sup_distance(compose(invert(h), h), CircleMap::identity(512)) < 1e-6);
  CHECK(sup_distance(reflect(reflect(h)), h) < 1e-12);
  const CircleMap r = CircleMap::rotation(0.7);
  CHECK(r.is_rotation());
  CHECK(reflect(r).is_rotation());
  CHECK(std::abs(reflect(r).lift(0.0) + 0.7) < 1e-14);
  CHECK_FALSE(h.is_rotation(1e-6));
}

TEST_CASE("disk automorphism boundary values match the Mobius map") {
  const Complex a{0.3, 0.2};
  const CircleMap h = CircleMap::disk_automorphism(a, 1024);
  const Mobius m = Mobius::disk_automorphism(a);
  for (int i = 0; i < 64; ++i) {
    const Complex z = std::polar(1.0, 0.1 * i);
    CHECK(std::abs(h(z) - m(z)) < 1e-8);
  }
}

TEST_CASE("quasisymmetry constant of the cubic converges to the dense sup") {
  // Dense oracle: with s = x / t the ratio is (3s^2+3s+1)/(3s^2-3s+1).
  double oracle = 0.0;
  for (int i = 1; i < 2000000; ++i) {
    const double s = i * 1e-6;
    oracle = std::max(oracle, (3 * s * s + 3 * s + 1) / (3 * s * s - 3 * s + 1));
  }
  CHECK(std::abs(oracle - (7.0 + 4.0 * std::sqrt(3.0))) < 1e-9);
  const auto cube = [](double x) { return x * x * x; };
  double prev = 0.0;
  for (int d : {256, 512, 1024}) {
    const QsReport r = qs_constant_line(cube, d);
    CHECK(r.k_estimate <= oracle * (1 + 1e-12));  // a lower bound
    CHECK(r.k_estimate >= prev);                  // nested samples
    CHECK(std::abs(r.k_estimate - oracle) / oracle < 0.02);
    prev = r.k_estimate;
  }
}

TEST_CASE("quasisymmetry of isometries and smooth maps") {
  CHECK(qs_constant(CircleMap::identity(256), 256).k_estimate == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(qs_constant(CircleMap::rotation(1.1), 256).k_estimate == doctest::Approx(1.0).epsilon(1e-9));
  // Mobius boundary values are symmetric under the Cayley conjugation.
  CHECK(qs_constant(CircleMap::disk_automorphism({0.5, 0.0}, 2048), 256).k_estimate < 1.01);
  CHECK(qs_constant(CircleMap::sine(0.5, 512), 256).k_estimate > 1.2);
  CHECK(qs_constant_line([](double x) { return 3.0 * x - 2.0; }, 256).k_estimate ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Beurling-Ahlfors extension") {
  const CircleMap h = CircleMap::sine(0.3, 512);
  const BeurlingAhlforsExtension ba(h);
  for (int i = 0; i < 32; ++i) {
    const Complex z = std::polar(1.0, 0.2 * i);
    CHECK(std::abs(ba(z) - h(z)) < 1e-6);
  }
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const Complex z = test::random_point(rng, 1.8);
    if (std::abs(std::abs(z) - 1.0) < 1e-3) continue;
    const Jet j = ba.jet(z);
    CHECK(j.jacobian() > 0.0);
    CHECK(std::abs(j.mu()) < 1.0);
    CHECK(std::abs(ba.inverse(j.value) - z) < 1e-9);
    // derivative check against central differences
    const double e = 1e-6;
    const Complex fx = (ba(z + e) - ba(z - e)) / (2 * e);
    const Complex fy = (ba(z + kI * e) - ba(z - kI * e)) / (2 * e);
    CHECK(std::abs(0.5 * (fx - kI * fy) - j.dz) < 1e-5);
    CHECK(std::abs(0.5 * (fx + kI * fy) - j.dzbar) < 1e-5);
  }
  const BeurlingAhlforsExtension id(CircleMap::identity(256));
  CHECK(std::abs(id(Complex{0.3, 0.4}) - Complex{0.3, 0.4}) < 1e-10);
}

TEST_CASE("annulus interpolation") {
  const CircleMap in = CircleMap::identity(256), out = CircleMap::sine(0.2, 256);
  const AnnulusInterpolation w(in, out, 0.5, 1.0);
  for (int i = 0; i < 24; ++i) {
    const double th = 0.26 * i;
    CHECK(std::abs(w(std::polar(0.5, th)) - std::polar(0.5, th)) < 1e-12);
    CHECK(std::abs(w(std::polar(1.0, th)) - out(std::polar(1.0, th))) < 1e-12);
    const Complex z = std::polar(0.73, th);
    CHECK(std::abs(w.inverse(w(z)) - z) < 1e-10);
    CHECK(w.jet(z).jacobian() > 0.0);
  }
  CHECK_THROWS_CODE(AnnulusInterpolation(in, out, 1.0, 0.5), ErrorCode::RadiiOrder);
}

TEST_CASE("circle map JSON round trip") {
  const CircleMap h = CircleMap::sine(0.25, 64, 3, 0.1);
  const CircleMap back = circle_map_from_json(to_json(h));
  REQUIRE(back.size() == h.size());
  for (int i = 0; i < h.size(); ++i) CHECK(back.lift_samples()[i] == h.lift_samples()[i]);
}
