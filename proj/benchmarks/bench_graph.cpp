#include "mdpstab/graph.hpp"
#include "support/oracles.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

void BM_MecDecomposition(benchmark::State& state) {
    std::mt19937_64 rng(7);
    std::vector<mdpstab::Mdp> models;
    for (int i = 0; i < 16; ++i)
        models.push_back(mdpstab::oracles::random_mdp(rng, static_cast<int>(state.range(0)),
                                                      2 * static_cast<int>(state.range(0))));
    std::size_t i = 0;
    for (auto _ : state) {
        auto mecs = mdpstab::mec_decomposition(models[i++ % models.size()]);
        benchmark::DoNotOptimize(mecs);
    }
}
BENCHMARK(BM_MecDecomposition)->Arg(4)->Arg(8);

}  // namespace
