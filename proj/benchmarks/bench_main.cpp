// Micro benchmarks for the simulation and scoring hot paths.
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "ghisim/copulas.hpp"
#include "ghisim/marginals.hpp"
#include "ghisim/math_utils.hpp"
#include "ghisim/scenario.hpp"
#include "ghisim/scoring.hpp"

using namespace ghisim;

namespace {

ModelBundle flat_bundle(const CopulaSpec& intraday) {
  ModelBundle bundle;
  bundle.variant = Variant::C2;
  bundle.noon = CopulaSpec::gumbel(1.7);
  bundle.bounds.toa_grid.assign(365 * 24, 1000.0);
  FourierModel lam;
  lam.coeffs = {500.0};
  QuantileFit qf;
  qf.model.coeffs = {800.0};
  FourierModel zero;
  zero.coeffs = {0.0};
  for (int h = 8; h <= 16; ++h) {
    bundle.bounds.lambda[h] = lam;
    bundle.bounds.upper_fits[h] = qf;
    bundle.marginals.lambda[h] = zero;
    bundle.marginals.coeffs[h] =
        BetaRegCoeffs{0.2, 0.0, std::log(6.0), 0.0};
    if (h < 16) bundle.intraday[h] = intraday;
  }
  bundle.bounds.excess_seasonality.period = 24.0;
  bundle.bounds.excess_seasonality.coeffs = {0.0};
  bundle.bounds.upper_gpd = GpdFit{0.5, -0.5, 100};
  return bundle;
}

void BM_HInverseGumbel(benchmark::State& state) {
  const CopulaSpec spec = CopulaSpec::gumbel(2.0);
  math::CounterRng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(h_inverse(spec, rng.uniform(), rng.uniform()));
  }
}
BENCHMARK(BM_HInverseGumbel);

void BM_HInverseGaussian(benchmark::State& state) {
  const CopulaSpec spec = CopulaSpec::gaussian(0.6);
  math::CounterRng rng(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(h_inverse(spec, rng.uniform(), rng.uniform()));
  }
}
BENCHMARK(BM_HInverseGaussian);

void BM_BetaQuantile(benchmark::State& state) {
  const BetaParams p{0.55, 6.0};
  math::CounterRng rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(p.quantile(rng.uniform()));
  }
}
BENCHMARK(BM_BetaQuantile);

void BM_SimulateYear(benchmark::State& state) {
  const ModelBundle bundle = flat_bundle(CopulaSpec::gumbel(2.0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(bundle, 1, seed++));
  }
}
BENCHMARK(BM_SimulateYear)->Unit(benchmark::kMillisecond);

void BM_CrpsEnsemble(benchmark::State& state) {
  const auto grid = default_tau_grid();
  math::CounterRng rng(4);
  std::vector<double> ens(static_cast<std::size_t>(state.range(0)));
  for (double& v : ens) v = rng.uniform();
  for (auto _ : state) {
    benchmark::DoNotOptimize(crps(ens, 0.4, grid));
  }
}
BENCHMARK(BM_CrpsEnsemble)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
