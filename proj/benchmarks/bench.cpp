#include <benchmark/benchmark.h>

#include "blochball/bloch.hpp"
#include "blochball/geometry.hpp"
#include "blochball/verify.hpp"

namespace {

using namespace blochball;

BallPoint point_in(int n, Rng& rng, double rmax) {
  CVec v(n);
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    v[k] = {rng.gaussian(), rng.gaussian()};
    s += std::norm(v[k]);
  }
  const double r = rmax * std::pow(rng.uniform01(), 1.0 / (2.0 * n));
  for (cplx& c : v) c *= r / std::sqrt(s);
  return BallPoint(std::move(v));
}

void BM_PseudoHyperbolic(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  const BallPoint z = point_in(n, rng, 0.9);
  const BallPoint w = point_in(n, rng, 0.9);
  for (auto _ : state)
    benchmark::DoNotOptimize(geom::pseudo_hyperbolic(z, w));
}
BENCHMARK(BM_PseudoHyperbolic)->Arg(1)->Arg(2)->Arg(3);

void BM_Density(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(2);
  const holo::HoloMap f = holo::random_polynomial(n, 4, rng);
  const BallPoint z = point_in(n, rng, 0.9);
  const bloch::BlochParams p{n, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(bloch::density(f, z, p));
}
BENCHMARK(BM_Density)->Arg(1)->Arg(2)->Arg(3);

void BM_CurveLength(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(3);
  const BallPoint z = point_in(n, rng, 0.9);
  const BallPoint w = point_in(n, rng, 0.9);
  const geom::Curve c = geom::pulled_radius_curve(z, w);
  QuadratureSpec q;
  for (auto _ : state) benchmark::DoNotOptimize(geom::curve_length(c, q));
}
BENCHMARK(BM_CurveLength)->Arg(1)->Arg(3);

void BM_Prenorm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(4);
  const holo::HoloMap f = holo::random_polynomial(n, 4, rng);
  const bloch::BlochParams p{n, 1.0};
  bloch::PrenormBudget budget;
  for (auto _ : state)
    benchmark::DoNotOptimize(bloch::prenorm(f, p, budget, 7));
}
BENCHMARK(BM_Prenorm)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_LipschitzRatio(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(5);
  const holo::HoloMap f = holo::random_polynomial(n, 4, rng);
  const BallPoint z = point_in(n, rng, 0.9);
  const BallPoint w = point_in(n, rng, 0.9);
  for (auto _ : state)
    benchmark::DoNotOptimize(verify::lipschitz_ratio(f, z, w, n));
}
BENCHMARK(BM_LipschitzRatio)->Arg(1)->Arg(3);

}  // namespace

BENCHMARK_MAIN();
