#pragma once

#include "mdpstab/markov.hpp"

#include <optional>

namespace mdpstab {

/// Per-state expected mean payoff and expected local variance of the chain
/// induced by a memoryless deterministic strategy.
std::vector<LongRunStats> md_local_stats(const Mdp& mdp,
                                         const MemorylessDeterministicStrategy& md);

/// Product MDP G[pi, pi'] of the 3-memory reduction: a fresh start state, an
/// m1 copy of the state space with commit actions into frozen m2/m2' copies,
/// and a two-dimensional reward vector per action (by source state).
struct ProductMdp {
    Mdp mdp;
    std::vector<Rat> r1, r2;          // per product action
    int s_in = -1;                    // product start state
    std::vector<int> base_state;      // per product state; -1 for s_in
    std::vector<int> layer;           // per product state: 0 s_in, 1 m1, 2 m2, 3 m2'
    std::vector<int> m1_state;        // per base state: product index of (s, m1)
    std::vector<int> commit1_action;  // per base state: product action [pi] at (s, m1)
    std::vector<int> commit2_action;  // per base state: [pi'] at (s, m1)
    std::vector<int> lifted_action;   // per (base action): its m1-copy product action
    std::vector<int> default2_action;  // per base state: default at (s, m2)
    std::vector<int> default3_action;  // per base state: default at (s, m2')
};

ProductMdp build_product(const Mdp& mdp, const MemorylessDeterministicStrategy& pi,
                         const MemorylessDeterministicStrategy& pi2);

enum class LocalAnswer { Yes, No, BudgetExceeded };

struct LocalWitness {
    MemorylessDeterministicStrategy pi, pi2;
    std::vector<Rat> commit1, commit2;   // arrival commit probabilities per state
    Dist initial_commit;                 // over {m1, m2, m2'}
    StochasticUpdateStrategy strategy;   // 3-memory
    Rat mean;                            // exact E[mp] of the strategy
    Rat local_variance;                  // exact E[lv]
};

struct LocalCheckResult {
    LocalAnswer answer = LocalAnswer::No;
    std::optional<LocalWitness> witness;
};

/// Exact decision of (E[mp], E[lv]) <= (u, v): enumerates memoryless
/// deterministic pairs in canonical order and solves the two-dimensional
/// mean-payoff feasibility system on each product. The budget caps the number
/// of pairs tried; exceeding it without a Yes reports BudgetExceeded.
LocalCheckResult check_local(const Mdp& mdp, int s0, const Rat& u, const Rat& v,
                             std::optional<unsigned long long> pair_budget = std::nullopt);

/// Number of memoryless deterministic strategies of the MDP.
unsigned long long count_md_strategies(const Mdp& mdp);

/// The i-th memoryless deterministic strategy in canonical order.
MemorylessDeterministicStrategy md_strategy_at(const Mdp& mdp, unsigned long long index);

}  // namespace mdpstab
