#include "qsweld/beltrami.hpp"
#include "support.hpp"

using namespace qsweld;

namespace {

double sup_error(const PlaneMap& w, const std::function<Complex(Complex)>& exact, double r0, double r1) {
  double e = 0.0;
  for (int k = 0; k < w.grid.n; ++k)
    for (int j = 0; j < w.grid.n; ++j) {
      const Complex z = w.grid.node(j, k);
      const double r = std::abs(z);
      if (r >= r0 && r <= r1) e = std::max(e, std::abs(w.values[w.grid.index(j, k)] - exact(z)));
    }
  return e;
}

}  // namespace

TEST_CASE("zero dilatation gives the identity") {
  const GridSpec g{2.0, 128};
  SolveStats st;
  const PlaneMap w = solve_beltrami(BeltramiField::zero(g), 1e-10, 100, &st);
  CHECK(sup_error(w, [](Complex z) { return z; }, 0.0, 10.0) < 1e-12);
  CHECK(w.normalization == Normalization::Fix01Inf);
}

TEST_CASE("radial stretch closed form") {
  // w = z |z|^a with a = 2k/(1-k) solves mu = k z/zbar on the unit disk.
  const double k = 0.3, a = 2 * k / (1 - k);
  const auto exact = [a](Complex z) {
    const double r = std::abs(z);
    return r <= 1.0 ? z * std::pow(r, a) : z;
  };
  // The closed form satisfies the Beltrami equation: finite-difference check.
  for (Complex z : {Complex{0.3, 0.2}, Complex{-0.5, 0.6}, Complex{0.1, -0.7}}) {
    const double e = 1e-6;
    const Complex fx = (exact(z + e) - exact(z - e)) / (2 * e);
    const Complex fy = (exact(z + kI * e) - exact(z - kI * e)) / (2 * e);
    const Complex dz = 0.5 * (fx - kI * fy), dzb = 0.5 * (fx + kI * fy);
    CHECK(std::abs(dzb / dz - k * z / std::conj(z)) < 1e-7);
  }
  const GridSpec g{4.0, 256};
  const auto mu = BeltramiField::from_function(
      g, [k](Complex z) {
        if (z == Complex{0.0}) return Complex{k};
        return std::abs(z) <= 1.0 ? k * z / std::conj(z) : Complex{0.0};
      }, 1.0);
  SolveStats st;
  const PlaneMap w = solve_beltrami(mu, 1e-10, 2000, &st);
  CHECK(st.residual < 1e-9);
  CHECK(sup_error(w, exact, 0.0, 0.9) < 1e-2);
  CHECK(sup_error(w, exact, 0.9, 1.5) < 4e-2);
}

TEST_CASE("solution dilatation matches the input") {
  const GridSpec g{2.0, 256};
  const auto mu = BeltramiField::from_function(
      g, [](Complex z) { return 0.3 * std::exp(-8.0 * std::norm(z - Complex{0.2, 0.1})); }, 0.9);
  const PlaneMap w = solve_beltrami(mu);
  const BeltramiField back = dilatation(w);
  double e = 0.0;
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      if (std::abs(g.node(j, k)) < 0.8) e = std::max(e, std::abs(back.values[g.index(j, k)] - mu.values[g.index(j, k)]));
  CHECK(e < 1e-2);
  // Fix01Inf normalization.
  CHECK(std::abs(w(0.0)) < 1e-10);
  CHECK(std::abs(w(1.0) - 1.0) < 1e-10);
}

TEST_CASE("solver budgets") {
  const GridSpec g{2.0, 128};
  const auto big = BeltramiField::from_function(g, [](Complex) { return Complex{0.97}; }, 0.5);
  CHECK_THROWS_CODE(solve_beltrami(big), ErrorCode::BudgetExceeded);
  const auto wide = BeltramiField::from_function(g, [](Complex) { return Complex{0.2}; }, 1.5);
  CHECK_THROWS_CODE(solve_beltrami(wide), ErrorCode::BudgetExceeded);
}

TEST_CASE("dilatation helpers") {
  CHECK(maximal_dilatation(0.5) == doctest::Approx(3.0));
  CHECK(maximal_dilatation(0.0) == doctest::Approx(1.0));
  const GridSpec g{2.0, 64};
  const auto mu = BeltramiField::from_function(g, [](Complex) { return Complex{0.0, 0.2}; }, 0.5);
  CHECK(maximal_dilatation(mu) == doctest::Approx(1.5));
  CHECK(teichmuller_distance_upper(mu, mu) == doctest::Approx(0.0));
  CHECK(teichmuller_distance_upper(mu, BeltramiField::zero(g)) ==
        doctest::Approx(0.5 * std::log(1.5)).epsilon(1e-12));
}

TEST_CASE("normalize01") {
  const GridSpec g{2.0, 64};
  const PlaneMap m = PlaneMap::sample(g, [](Complex z) { return 2.0 * z + Complex{0.5, 1.0}; });
  const PlaneMap n = normalize01(m);
  CHECK(std::abs(n(0.0)) < 1e-12);
  CHECK(std::abs(n(1.0) - 1.0) < 1e-12);
  CHECK(std::abs(n(Complex{0.3, 0.2}) - Complex{0.3, 0.2}) < 1e-12);
}
