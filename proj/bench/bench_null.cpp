// Serial reference vs OpenMP replicate loops.
#include <benchmark/benchmark.h>

#include <cstdint>

#include "survhc/decay_sim.hpp"
#include "survhc/exact_hyg.hpp"
#include "survhc/phase_transition.hpp"
#include "survhc/resampling_null.hpp"
#include "survhc/statistic.hpp"

using namespace survhc;

namespace {

const IntervalTable& observed() {
    static const IntervalTable table = [] {
        auto rng = make_rng(7, {});
        return simulate(calibrate(400, 0.55, 1.5), Hypothesis::H1, rng).table;
    }();
    return table;
}

void relabel_null(benchmark::State& state, const Execution& exec) {
    const auto gen = permutation_null(cohort_from_table(observed()));
    const auto stat = [](const IntervalTable& t) { return score(StatisticKind::hchg, t); };
    for (auto _ : state) {
        auto calib = null_quantile(gen, stat, static_cast<std::size_t>(state.range(0)), 0.05, 11, exec);
        benchmark::DoNotOptimize(calib.quantile);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RelabelNullSerial(benchmark::State& state) { relabel_null(state, Execution::reference()); }
void BM_RelabelNullParallel(benchmark::State& state) { relabel_null(state, Execution::parallel()); }

void power(benchmark::State& state, const Execution& exec) {
    const auto params = calibrate(400, 0.6, 1.0);
    const auto calib = calibrate_decay_null(params, {StatisticKind::hchg}, 200, 0.05, 3, exec).front();
    for (auto _ : state) {
        auto est = power_cell(params, StatisticKind::hchg, calib, static_cast<std::size_t>(state.range(0)), 5, exec);
        benchmark::DoNotOptimize(est.rejections);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PowerCellSerial(benchmark::State& state) { power(state, Execution::reference()); }
void BM_PowerCellParallel(benchmark::State& state) { power(state, Execution::parallel()); }

void BM_HygSf(benchmark::State& state) {
    const std::int64_t M = state.range(0);
    const HygParams h{M, M / 2, M / 10};
    std::int64_t m = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(hyg_sf(h, m));
        m = (m + 1) % (M / 10 + 1);
    }
}

}  // namespace

BENCHMARK(BM_RelabelNullSerial)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RelabelNullParallel)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PowerCellSerial)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PowerCellParallel)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HygSf)->Arg(100)->Arg(10000)->Arg(1000000);

BENCHMARK_MAIN();
