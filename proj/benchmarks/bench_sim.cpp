#include "mdpstab/sim.hpp"
#include "support/fixtures.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace mdpstab;

void BM_Simulate(benchmark::State& state) {
    Mdp g = fixtures::m_glob();
    auto strategy = fixtures::glob_first_visit_strategy(g);
    SimConfig cfg;
    cfg.runs = state.range(0);
    cfg.horizon = 1000;
    cfg.seed = 1;
    for (auto _ : state) {
        auto stats = simulate(g, strategy, g.state_index("s1"), cfg);
        benchmark::DoNotOptimize(stats);
    }
    state.SetItemsProcessed(state.iterations() * cfg.runs * cfg.horizon);
}
BENCHMARK(BM_Simulate)->Arg(100)->Arg(1000);

}  // namespace
