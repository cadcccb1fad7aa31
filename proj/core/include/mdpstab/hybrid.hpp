#pragma once

#include "mdpstab/markov.hpp"
#include "mdpstab/sim.hpp"

#include <optional>

namespace mdpstab {

/// Linear skeleton of the system L_H: transient flow for y, normalization,
/// per-MEC coupling of y mass and recurrent x mass, and flow balance for x.
/// The mean and squared-mean rows are kept as coefficient vectors for the
/// checker's sweep.
struct HybridSystem {
    LinearProgram base;
    int s0 = -1;
    std::vector<int> y_state_var;
    std::vector<int> y_action_var;
    std::vector<int> x_action_var;
    std::vector<Mec> mecs;
    std::vector<std::pair<int, Rat>> mean_coeffs;  // sum_a x_a r(a)
    std::vector<std::pair<int, Rat>> sq_coeffs;    // sum_a x_a r(a)^2
};

HybridSystem build_system_LH(const Mdp& mdp, int s0);

struct HybridWitness {
    std::vector<Rat> assignment;  // over the HybridSystem variables
    Rat mu;                       // winning grid pivot
    Rat mean, hybrid_variance;    // exact values of the synthesized strategy
    StochasticUpdateStrategy strategy;
};

struct HybridCheckResult {
    bool yes = false;
    std::optional<HybridWitness> witness;
};

/// Sweeps mu over multiples of tau = eps / (8 max{N,1}) in [min r, max r],
/// pinning mu - tau <= sum x_a r(a) <= min(mu + tau, u) and bounding
/// sum x_a r^2(a) <= v + 2 max|r| tau + mu^2, each an exact LP.
HybridCheckResult approx_check_hybrid(const Mdp& mdp, int s0, const Rat& u, const Rat& v,
                                      const Rat& eps);

/// 2-memory strategy from a feasible L_H assignment: transient play along
/// y_a with per-state switch probability, then memoryless play along the
/// recurrent x frequencies of the hosting MEC. When a MEC's x support splits
/// into several end components, the flow is re-solved with per-component
/// coupling so the trapped masses match exactly (InfeasibleSolution when
/// that repair fails).
StochasticUpdateStrategy synthesize_hybrid(const Mdp& mdp, const HybridSystem& sys,
                                           std::vector<Rat>& assignment);

/// Exact and Monte Carlo report of the identity
/// E[hv] = Var[mp] + E[lv] for a finite-memory strategy.
struct RelationReport {
    Rat exact_hybrid;
    Rat exact_var_mp;
    Rat exact_local;
    bool exact_equal;
    double mc_hybrid, mc_var_mp, mc_local;
    double mc_se_hybrid, mc_se_var_mp, mc_se_local;
    bool mc_agree;  // |hv - (var+lv)| <= 3 * combined stderr
};

RelationReport check_relation(const Mdp& mdp, const StochasticUpdateStrategy& strategy, int s0,
                              const SimConfig& cfg);

}  // namespace mdpstab
