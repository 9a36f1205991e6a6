// Serial reference vs OpenMP path for the parallel kernels.

#include <benchmark/benchmark.h>

#include "aep/entropy.hpp"
#include "aep/experiments.hpp"
#include "aep/random.hpp"
#include "aep/smoothing.hpp"
#include "aep/tensor_core.hpp"

namespace {

aep::Exec exec_of(const benchmark::State &state) {
    return state.range(0) == 0 ? aep::Exec::serial : aep::Exec::parallel;
}

void BM_TypeSpectrum(benchmark::State &state) {
    const aep::Distribution p({0.4, 0.3, 0.2, 0.1});
    for (auto _ : state) {
        auto spec = aep::product_type_spectrum(p, 120, exec_of(state));
        benchmark::DoNotOptimize(spec.entries.data());
    }
}
BENCHMARK(BM_TypeSpectrum)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ApplyLocal(benchmark::State &state) {
    aep::Rng rng(7);
    const auto psi = aep::random_state({8, 8, 8, 8, 8}, rng);
    const Eigen::MatrixXcd op = aep::haar_isometry(8, 8, rng);
    for (auto _ : state) {
        auto out = aep::apply_local(psi, 2, op, exec_of(state));
        benchmark::DoNotOptimize(out.amps().data());
    }
}
BENCHMARK(BM_ApplyLocal)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Variational(benchmark::State &state) {
    const aep::Distribution p({0.5, 0.3, 0.2});
    for (auto _ : state) {
        auto c = aep::variational_renyi_check(p, 0.5, 1e-3, exec_of(state));
        benchmark::DoNotOptimize(c.gap);
    }
}
BENCHMARK(BM_Variational)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_AdditivitySweep(benchmark::State &state) {
    aep::SweepSettings s;
    s.samples = 200;
    s.exec = exec_of(state);
    for (auto _ : state) {
        auto r = aep::sweep_full_additivity(s);
        benchmark::DoNotOptimize(r.stats.worst);
    }
}
BENCHMARK(BM_AdditivitySweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
