// Serial vs OpenMP kernels on generated markets: the blocking-pair audit and
// the per-round choice evaluations inside DA.

#include <benchmark/benchmark.h>

#include "popmatch/audit.hpp"
#include "popmatch/engine.hpp"
#include "popmatch/synth.hpp"

using namespace popmatch;

namespace {

struct Scenario {
    StrictMarket sm;
    Matching matching;
};

Scenario make_scenario(int candidates, int pmas) {
    synth::GenConfig cfg;
    cfg.candidates = candidates;
    cfg.pmas = pmas;
    cfg.slots_min = std::max(1, candidates / pmas / 2);
    cfg.slots_max = std::max(2, candidates / pmas);
    cfg.pops_min = 4;
    cfg.pops_max = 10;
    cfg.list_min = 2;
    cfg.list_max = std::min(8, pmas);
    cfg.tie_probability = 0.1;
    cfg.mode = synth::GenMode::arbitrary_intersecting;
    cfg.seed = 7;
    Scenario s;
    s.sm = apply_tie_breaking(synth::generate(cfg));
    s.matching = run_da(s.sm, ChoiceKind::y2018).matching;
    return s;
}

void bench_audit_serial(benchmark::State& state) {
    const auto s = make_scenario(static_cast<int>(state.range(0)), 42);
    for (auto _ : state) {
        auto pairs = find_blocking_pairs_serial(s.sm, ChoiceKind::y2018, s.matching);
        benchmark::DoNotOptimize(pairs);
    }
}

void bench_audit_openmp(benchmark::State& state) {
    const auto s = make_scenario(static_cast<int>(state.range(0)), 42);
    for (auto _ : state) {
        auto pairs = find_blocking_pairs(s.sm, ChoiceKind::y2018, s.matching);
        benchmark::DoNotOptimize(pairs);
    }
}

void bench_da_serial(benchmark::State& state) {
    const auto s = make_scenario(static_cast<int>(state.range(0)), 42);
    for (auto _ : state) {
        auto out = run_da(s.sm, ChoiceKind::y2018, false);
        benchmark::DoNotOptimize(out);
    }
}

void bench_da_openmp(benchmark::State& state) {
    const auto s = make_scenario(static_cast<int>(state.range(0)), 42);
    for (auto _ : state) {
        auto out = run_da(s.sm, ChoiceKind::y2018, true);
        benchmark::DoNotOptimize(out);
    }
}

}  // namespace

BENCHMARK(bench_audit_serial)->Arg(500)->Arg(3100)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_audit_openmp)->Arg(500)->Arg(3100)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_da_serial)->Arg(500)->Arg(3100)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_da_openmp)->Arg(500)->Arg(3100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
