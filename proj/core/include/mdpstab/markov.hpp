#pragma once

#include "mdpstab/graph.hpp"
#include "mdpstab/lp.hpp"
#include "mdpstab/model.hpp"

#include <vector>

namespace mdpstab {

/// Minimal/maximal expected mean payoff achievable inside a MEC.
struct PayoffInterval {
    Rat alpha;
    Rat beta;
};

/// alpha_C and beta_C, the extremes of sum_a x_a r(a) over frequency
/// functions on the MEC (flow balance, total mass one).
PayoffInterval mec_payoff_bounds(const Mdp& mdp, const Mec& mec);

/// Per-location probability of eventually reaching `target` locations.
std::vector<Rat> chain_reach_probabilities(const MarkovChain& chain,
                                           const std::vector<int>& target);

/// Exact quantitative summary of a finite chain: BSCC structure, stationary
/// distributions, and the moments of the long-run reward functionals.
struct ChainAnalysis {
    std::vector<Bscc> components;
    std::vector<std::vector<Rat>> stationary;   // per BSCC, over its locations
    std::vector<Rat> mean;                      // per BSCC: mean payoff
    std::vector<Rat> mean_sq_reward;            // per BSCC: sum stat * r^2
    std::vector<Rat> local_variance;            // per BSCC
    std::vector<std::vector<Rat>> reach;        // per BSCC, per location
    std::vector<Rat> trap_probability;          // per BSCC, from chain.initial

    Rat expected_mean_payoff;
    Rat variance_of_mean_payoff;
    Rat expected_local_variance;
    Rat expected_mean_payoff_r2;  // mean payoff w.r.t. squared rewards
    Rat expected_hybrid_variance;  // = expected_mean_payoff_r2 - E[mp]^2
};

ChainAnalysis analyze_chain(const MarkovChain& chain);

struct LongRunStats {
    Rat mean_payoff;
    Rat local_variance;
};

/// E[mp] and E[lv] of the chain started in a single location.
LongRunStats chain_long_run_stats(const MarkovChain& chain, int from);

/// Minimal expected cumulative reward among strategies reaching `target`
/// almost surely, over the almost-sure winning region. Outside the region no
/// value exists (TargetNotAlmostSureReachable when queried).
struct CumulativeRewardResult {
    std::vector<int> winning;               // sorted states with a value
    std::vector<Rat> value;                 // per state; meaningful on winning
    MemorylessDeterministicStrategy witness;
};
CumulativeRewardResult min_cumulative_reward_as_reach(const Mdp& mdp,
                                                      const std::vector<int>& target);

/// Solves A x = b exactly by Gaussian elimination. Throws on singular A.
std::vector<Rat> solve_linear_system(std::vector<std::vector<Rat>> a, std::vector<Rat> b);

/// Stationary distribution of the chain restricted to one BSCC, indexed like
/// bscc.locations.
std::vector<Rat> bscc_stationary(const MarkovChain& chain, const Bscc& bscc);

}  // namespace mdpstab
