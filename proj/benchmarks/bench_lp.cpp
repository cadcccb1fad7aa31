#include "mdpstab/lp.hpp"
#include "support/oracles.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

void BM_SolveRandomLp(benchmark::State& state) {
    std::mt19937_64 rng(42);
    std::vector<mdpstab::LinearProgram> programs;
    for (int i = 0; i < 32; ++i)
        programs.push_back(mdpstab::oracles::random_bounded_lp(rng, static_cast<int>(state.range(0))));
    std::size_t i = 0;
    for (auto _ : state) {
        auto out = mdpstab::solve_lp(programs[i++ % programs.size()]);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_SolveRandomLp)->Arg(2)->Arg(4);

}  // namespace
