#include "qsweld/grid.hpp"
#include "support.hpp"

using namespace qsweld;

TEST_CASE("grid geometry") {
  const GridSpec g{2.0, 64};
  CHECK(g.spacing() == doctest::Approx(1.0 / 16));
  CHECK(g.node(32, 32) == Complex{0.0, 0.0});
  CHECK(g.node(0, 0) == Complex{-2.0, -2.0});
  CHECK(g.index(3, 2) == 2u * 64 + 3);
  const auto [u, v] = g.fractional_index(g.node(5, 9));
  CHECK(u == doctest::Approx(5));
  CHECK(v == doctest::Approx(9));
  CHECK(g.contains(Complex{1.9, -2.0}));
  CHECK_FALSE(g.contains(Complex{1.99, 0.0}));
  CHECK_THROWS_CODE((GridSpec{2.0, 100}.validate()), ErrorCode::InvalidGrid);
  CHECK_THROWS_CODE((GridSpec{2.0, 32}.validate()), ErrorCode::InvalidGrid);
  CHECK_THROWS_CODE((GridSpec{-1.0, 64}.validate()), ErrorCode::InvalidGrid);
}

TEST_CASE("Beltrami field construction") {
  const GridSpec g{2.0, 64};
  const auto f = BeltramiField::from_function(g, [](Complex) { return Complex{0.5, 0.0}; }, 1.0);
  CHECK(f.sup_norm() == doctest::Approx(0.5));
  CHECK(f.occupied_radius() <= 1.0);
  CHECK(f.interpolate(0.0) == Complex{0.5});
  CHECK(f.interpolate(Complex{1.8, 0.0}) == Complex{0.0});
  CHECK(BeltramiField::zero(g).is_zero());
  CHECK_THROWS_CODE(BeltramiField::from_function(g, [](Complex) { return Complex{1.0}; }, 1.0),
                    ErrorCode::BudgetExceeded);
  std::vector<Complex> v(10);
  CHECK_THROWS_CODE(BeltramiField::make(g, v, 1.0), ErrorCode::DimensionMismatch);
}

TEST_CASE("bicubic plane map interpolation reproduces quadratics") {
  const GridSpec g{2.0, 64};
  const auto f = [](Complex z) { return z * z + 2.0 * std::conj(z) * z; };
  const PlaneMap m = PlaneMap::sample(g, f);
  for (Complex z : {Complex{0.31, -0.27}, Complex{-1.1, 0.9}, Complex{0.0, 0.013}}) {
    const Jet j = m.jet(z);
    CHECK(std::abs(j.value - f(z)) < 1e-12);
    CHECK(std::abs(j.dz - (2.0 * z + 2.0 * std::conj(z))) < 1e-10);
    CHECK(std::abs(j.dzbar - 2.0 * z) < 1e-10);
  }
  CHECK_THROWS_CODE(m.jet(Complex{5.0, 0.0}), ErrorCode::OutOfWindow);
  const Complex target{0.4, 0.1};
  const PlaneMap sq = PlaneMap::sample(g, [](Complex z) { return z + 0.1 * z * z; });
  const Complex z = sq.inverse(target, target);
  CHECK(std::abs(z + 0.1 * z * z - target) < 1e-11);
}

TEST_CASE("far field expansion") {
  FarField ff{2.0, 1.0, {Complex{0.5}}, 1.0};
  const Jet j = ff.jet(Complex{2.0, 0.0});
  CHECK(std::abs(j.value - (2.0 * (2.0 + 0.25) + 1.0)) < 1e-14);
  CHECK(std::abs(j.dz - 2.0 * (1.0 - 0.5 / 4.0)) < 1e-14);
}
