#include <benchmark/benchmark.h>

#include "qsweld/beltrami.hpp"
#include "qsweld/circle_map.hpp"
#include "qsweld/surfaces.hpp"
#include "qsweld/welding.hpp"

using namespace qsweld;

namespace {

BeltramiField radial(const GridSpec& g) {
  return BeltramiField::from_function(
      g, [](Complex z) { return z == Complex{0.0} ? Complex{0.3} : 0.3 * z / std::conj(z); }, 1.0);
}

void BM_SolveBeltrami(benchmark::State& state) {
  const GridSpec g{4.0, static_cast<int>(state.range(0))};
  const BeltramiField mu = radial(g);
  SolveStats st;
  for (auto _ : state) benchmark::DoNotOptimize(solve_beltrami(mu, 1e-10, 2000, &st));
  state.counters["iterations"] = st.iterations;
}
BENCHMARK(BM_SolveBeltrami)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_BeurlingAhlforsGrid(benchmark::State& state) {
  const GridSpec g{2.0, static_cast<int>(state.range(0))};
  const CircleMap h = CircleMap::sine(0.3, 1024);
  for (auto _ : state) benchmark::DoNotOptimize(beurling_ahlfors_extend(h, g));
}
BENCHMARK(BM_BeurlingAhlforsGrid)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_BeurlingAhlforsJet(benchmark::State& state) {
  const BeurlingAhlforsExtension ba(CircleMap::sine(0.3, 1024));
  Complex z{0.3, 0.2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(ba.jet(z));
    z *= Complex{0.999, 0.01};
  }
}
BENCHMARK(BM_BeurlingAhlforsJet);

void BM_QsConstantLine(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(qs_constant_line([](double x) { return x * x * x; }, d));
}
BENCHMARK(BM_QsConstantLine)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_QsConstantCircle(benchmark::State& state) {
  const CircleMap h = CircleMap::sine(0.3, 1024);
  for (auto _ : state) benchmark::DoNotOptimize(qs_constant(h, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_QsConstantCircle)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Weld(benchmark::State& state) {
  const GridSpec g{2.0, static_cast<int>(state.range(0))};
  const CircleMap h = CircleMap::sine(0.3, 1024);
  for (auto _ : state) benchmark::DoNotOptimize(weld_diagnostic(h, g));
}
BENCHMARK(BM_Weld)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Modulus(benchmark::State& state) {
  std::vector<Complex> in, out;
  for (int s = 0; s < 512; ++s) {
    in.push_back(std::polar(0.5, kTwoPi * s / 512));
    out.push_back(std::polar(1.0, kTwoPi * s / 512));
  }
  for (auto _ : state) benchmark::DoNotOptimize(modulus(in, out));
}
BENCHMARK(BM_Modulus)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
