#include "qsweld/mobius.hpp"
#include "qsweld/welding.hpp"
#include "support.hpp"

using namespace qsweld;

TEST_CASE("identity and rotations weld trivially") {
  const GridSpec g{2.0, 256};
  const WeldingResult id = weld(CircleMap::identity(256), g, 1e-6);
  CHECK(id.residual < 1e-6);
  CHECK(id.mu_sup == doctest::Approx(0.0));
  CHECK(fit_circle(id.seam).max_deviation < 1e-8);
  const CircleMap r = CircleMap::rotation(0.9, 256);
  const WeldingResult rot = weld(r, g, 1e-6);
  CHECK(welding_residual(rot, r) < 1e-6);
}

TEST_CASE("sine welding converges and refines") {
  const CircleMap h = CircleMap::sine(0.3, 1024);
  const WeldingResult coarse = weld_diagnostic(h, GridSpec{2.0, 128});
  const WeldingResult fine = weld_diagnostic(h, GridSpec{2.0, 256});
  const double rc = welding_residual(coarse, h), rf = welding_residual(fine, h);
  CHECK(rf < 1e-3);
  CHECK(rf < rc);
  // Welding identity G^{-1}(F(e^{i theta})) = h(e^{i theta}) pointwise.
  for (int i = 0; i < 16; ++i) {
    const Complex z = std::polar(1.0, 0.39 * i);
    const Complex w = fine.F_at(z);
    CHECK(std::abs(fine.G_inverse(w, h(z)) - h(z)) < 2e-3);
  }
  const QuasicircleReport q = quasicircle_check(fine.seam);
  CHECK(q.turning_constant >= 1.0);
  CHECK(q.refinement_stable);
  CHECK(fine.qs_estimate > 1.0);
}

TEST_CASE("Mobius welding recovers a circle") {
  // F = m on the disk and G = id outside is a conformal welding of h = m|S^1.
  const Mobius m{1.0, -0.3, -0.3, 1.0};
  const CircleMap h = CircleMap::disk_automorphism(0.3, 1024);
  const WeldingResult r = weld(h, GridSpec{2.0, 256}, 1e-3);
  const CircleFit fit = fit_circle(r.seam);
  CHECK(fit.max_deviation < 5e-3 * fit.radius);
  const Complex p[4] = {1.0, kI, -1.0, std::polar(1.0, 4.0)};
  const Complex num = cross_ratio(r.F_at(p[0]), r.F_at(p[1]), r.F_at(p[2]), r.F_at(p[3]));
  const Complex sym = cross_ratio(m(p[0]), m(p[1]), m(p[2]), m(p[3]));
  CHECK(std::abs(num - sym) < 2e-3);
}

TEST_CASE("weld enforces its tolerance") {
  CHECK_THROWS_CODE(weld(CircleMap::sine(0.6, 1024), GridSpec{2.0, 64}, 1e-9),
                    ErrorCode::ResidualTooLarge);
}

TEST_CASE("polyline geometry") {
  std::vector<Complex> circle, eight;
  for (int i = 0; i < 200; ++i) {
    const double t = kTwoPi * i / 200;
    circle.push_back(Complex{0.5, -0.2} + std::polar(2.0, t));
    eight.push_back({std::sin(t), std::sin(2 * t)});
  }
  const CircleFit f = fit_circle(circle);
  CHECK(std::abs(f.center - Complex{0.5, -0.2}) < 1e-12);
  CHECK(f.radius == doctest::Approx(2.0));
  CHECK(f.max_deviation < 1e-12);
  CHECK_FALSE(self_intersects(circle));
  CHECK(self_intersects(eight));
  CHECK_THROWS_CODE(quasicircle_check(eight), ErrorCode::SelfIntersecting);
  CHECK(turning_constant(circle) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
}
