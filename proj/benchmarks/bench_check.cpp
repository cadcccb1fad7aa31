#include "mdpstab/global.hpp"
#include "mdpstab/hybrid.hpp"
#include "support/fixtures.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace mdpstab;

void BM_CheckGlobal(benchmark::State& state) {
    Mdp g = fixtures::m_glob();
    Rat eps(1, state.range(0));
    for (auto _ : state) {
        auto res = approx_check_global(g, g.state_index("s1"), Rat(41, 10), Rat(21, 10), eps);
        benchmark::DoNotOptimize(res);
    }
}
BENCHMARK(BM_CheckGlobal)->Arg(4)->Arg(20);

void BM_CheckHybrid(benchmark::State& state) {
    Mdp g = fixtures::m_uni();
    Rat eps(1, state.range(0));
    for (auto _ : state) {
        auto res = approx_check_hybrid(g, g.state_index("s1"), Rat(31, 20), Rat(4, 5), eps);
        benchmark::DoNotOptimize(res);
    }
}
BENCHMARK(BM_CheckHybrid)->Arg(4)->Arg(20);

}  // namespace
