#pragma once

#include "mdpstab/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mdpstab {

struct SimConfig {
    long runs = 10000;
    long horizon = 1000;
    std::uint64_t seed = 0;
    std::optional<long> burn_in;          // default horizon / 10
    std::optional<double> exact_mean;     // second hv estimate centered here
    int threads = 0;                      // 0: hardware default (MDPSTAB_THREADS caps)

    long effective_burn_in() const { return burn_in.value_or(horizon / 10); }
};

/// Aggregated Monte Carlo estimates. The per-run vectors are kept for
/// stderr computation and estimator tests; aggregation uses pairwise
/// summation so results do not depend on execution order.
struct RunStatistics {
    std::vector<double> run_mean_payoff;      // per run
    std::vector<double> run_local_variance;   // per run

    double expected_mean_payoff = 0;
    double variance_of_mean_payoff = 0;       // sample variance across runs
    double expected_local_variance = 0;
    double expected_hybrid_variance = 0;      // centered on the estimated mean
    std::optional<double> hybrid_at_exact_mean;

    double se_mean_payoff = 0;
    double se_variance = 0;
    double se_local_variance = 0;
    double se_hybrid_variance = 0;
};

/// Deterministic given (inputs, seed): per-run streams are derived from the
/// seed and the run index through a splitmix hash.
RunStatistics simulate(const Mdp& mdp, const StochasticUpdateStrategy& strategy, int start,
                       const SimConfig& cfg);

struct QuantityCheck {
    std::string name;
    double estimate;
    double exact;
    double tolerance;
    bool pass;
};

/// Absolute-difference comparison per quantity; tolerance policy is the
/// caller's (for instance max(3 stderr, floor)).
std::vector<QuantityCheck> compare_exact(const RunStatistics& stats, double exact_mean,
                                         double exact_var, double exact_lv, double exact_hv,
                                         double tol_mean, double tol_var, double tol_lv,
                                         double tol_hv);

}  // namespace mdpstab
