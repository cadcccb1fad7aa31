#include "mdpstab/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace mdpstab {

namespace {

struct SplitMix {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

struct Cumulative {
    std::vector<double> cum;
    std::vector<int> item;
    int sample(double u) const {
        for (std::size_t i = 0; i + 1 < cum.size(); ++i)
            if (u < cum[i]) return item[i];
        return item.back();
    }
};

Cumulative make_cumulative(const Dist& d) {
    Cumulative c;
    double acc = 0;
    for (const auto& [i, p] : d) {
        acc += to_double(p);
        c.cum.push_back(acc);
        c.item.push_back(i);
    }
    return c;
}

/// Pairwise summation for order-independent, reproducible aggregation.
double pairwise_sum(const double* data, std::size_t n) {
    if (n <= 8) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

double pairwise_mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : pairwise_sum(v.data(), v.size()) / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
    return pairwise_sum(sq.data(), sq.size()) / static_cast<double>(v.size() - 1);
}

int resolve_threads(int requested) {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    int n = requested > 0 ? requested : hw;
    if (const char* env = std::getenv("MDPSTAB_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) n = std::min(n, cap);
    }
    return std::max(1, n);
}

}  // namespace

RunStatistics simulate(const Mdp& mdp, const StochasticUpdateStrategy& strategy, int start,
                       const SimConfig& cfg) {
    validate_strategy(mdp, strategy);
    const int M = strategy.memory_size();
    const long burn = std::max(0L, std::min(cfg.effective_burn_in(), cfg.horizon - 1));
    const long window = cfg.horizon - burn;

    // Flattened sampling tables.
    Cumulative initial = make_cumulative(strategy.initial_memory);
    std::vector<Cumulative> moves(static_cast<std::size_t>(mdp.num_states()) * M);
    for (int s = 0; s < mdp.num_states(); ++s)
        for (int m = 0; m < M; ++m)
            moves[static_cast<std::size_t>(s) * M + m] = make_cumulative(strategy.next_move[s][m]);
    std::vector<Cumulative> successors(mdp.num_actions());
    std::vector<double> reward(mdp.num_actions());
    for (int a = 0; a < mdp.num_actions(); ++a) {
        successors[a] = make_cumulative(mdp.action(a).transitions);
        reward[a] = to_double(mdp.action(a).reward);
    }
    std::vector<Cumulative> updates(static_cast<std::size_t>(mdp.num_actions()) *
                                    mdp.num_states() * M);
    for (int a = 0; a < mdp.num_actions(); ++a)
        for (int t = 0; t < mdp.num_states(); ++t)
            for (int m = 0; m < M; ++m)
                updates[(static_cast<std::size_t>(a) * mdp.num_states() + t) * M + m] =
                    make_cumulative(strategy.memory_update[a][t][m]);

    const long N = cfg.runs;
    std::vector<double> sum_r(N), sum_r2(N);

    auto run_range = [&](long lo, long hi) {
        for (long run = lo; run < hi; ++run) {
            SplitMix rng{cfg.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(run + 1)};
            int state = start;
            int memory = initial.sample(rng.uniform());
            int action = moves[static_cast<std::size_t>(state) * M + memory].sample(rng.uniform());
            double sr = 0, sr2 = 0;
            for (long step = 0; step < cfg.horizon; ++step) {
                double r = reward[action];
                if (step >= burn) {
                    sr += r;
                    sr2 += r * r;
                }
                int t = successors[action].sample(rng.uniform());
                memory = updates[(static_cast<std::size_t>(action) * mdp.num_states() + t) * M +
                                 memory]
                             .sample(rng.uniform());
                state = t;
                action = moves[static_cast<std::size_t>(state) * M + memory].sample(rng.uniform());
            }
            sum_r[run] = sr;
            sum_r2[run] = sr2;
        }
    };

    int threads = resolve_threads(cfg.threads);
    if (threads <= 1 || N < 2 * threads) {
        run_range(0, N);
    } else {
        std::vector<std::thread> pool;
        long chunk = (N + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            long lo = t * chunk, hi = std::min(N, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    RunStatistics stats;
    stats.run_mean_payoff.resize(N);
    stats.run_local_variance.resize(N);
    const double w = static_cast<double>(window);
    for (long i = 0; i < N; ++i) {
        double mp = sum_r[i] / w;
        stats.run_mean_payoff[i] = mp;
        stats.run_local_variance[i] = std::max(0.0, sum_r2[i] / w - mp * mp);
    }

    stats.expected_mean_payoff = pairwise_mean(stats.run_mean_payoff);
    stats.variance_of_mean_payoff =
        sample_variance(stats.run_mean_payoff, stats.expected_mean_payoff);
    stats.expected_local_variance = pairwise_mean(stats.run_local_variance);

    // Hybrid estimate: squared deviation from the aggregate mean estimate.
    auto hybrid_runs = [&](double center) {
        std::vector<double> hv(N);
        for (long i = 0; i < N; ++i)
            hv[i] = std::max(0.0, (sum_r2[i] - 2 * center * sum_r[i]) / w + center * center);
        return hv;
    };
    std::vector<double> hv = hybrid_runs(stats.expected_mean_payoff);
    stats.expected_hybrid_variance = pairwise_mean(hv);
    if (cfg.exact_mean) stats.hybrid_at_exact_mean = pairwise_mean(hybrid_runs(*cfg.exact_mean));

    const double n = static_cast<double>(N);
    stats.se_mean_payoff = std::sqrt(stats.variance_of_mean_payoff / n);
    stats.se_local_variance = std::sqrt(
        sample_variance(stats.run_local_variance, stats.expected_local_variance) / n);
    stats.se_hybrid_variance =
        std::sqrt(sample_variance(hv, stats.expected_hybrid_variance) / n);
    {
        // stderr of the sample variance via the spread of squared deviations.
        std::vector<double> sq(N);
        for (long i = 0; i < N; ++i) {
            double d = stats.run_mean_payoff[i] - stats.expected_mean_payoff;
            sq[i] = d * d;
        }
        double mean_sq = pairwise_mean(sq);
        stats.se_variance = std::sqrt(sample_variance(sq, mean_sq) / n);
    }
    return stats;
}

std::vector<QuantityCheck> compare_exact(const RunStatistics& stats, double exact_mean,
                                         double exact_var, double exact_lv, double exact_hv,
                                         double tol_mean, double tol_var, double tol_lv,
                                         double tol_hv) {
    auto entry = [](const char* name, double est, double exact, double tol) {
        return QuantityCheck{name, est, exact, tol, std::abs(est - exact) <= tol};
    };
    return {
        entry("mean_payoff", stats.expected_mean_payoff, exact_mean, tol_mean),
        entry("variance_of_mean_payoff", stats.variance_of_mean_payoff, exact_var, tol_var),
        entry("local_variance", stats.expected_local_variance, exact_lv, tol_lv),
        entry("hybrid_variance", stats.expected_hybrid_variance, exact_hv, tol_hv),
    };
}

}  // namespace mdpstab
