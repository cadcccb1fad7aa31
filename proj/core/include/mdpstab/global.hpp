#pragma once

#include "mdpstab/markov.hpp"

#include <map>
#include <optional>

namespace mdpstab {

/// Memoryless randomized strategy on a (sub-)MDP, one distribution per state.
struct MecStrategy {
    std::vector<Dist> per_state;
};

/// Memoryless randomized strategy on the MEC under which almost every run has
/// mean payoff exactly z, built by convexly mixing the action frequencies of
/// an everywhere-positive strategy with an extremal one. Requires
/// alpha_C <= z <= beta_C (ZOutsideInterval otherwise).
MecStrategy sigma_zc(const Mdp& mec_mdp, const Rat& z);

/// Transient-flow polytope of the system L: variables y_s, y_a with the flow
/// equations and the normalization over MEC states, plus per-MEC aggregates.
struct GlobalSystem {
    LinearProgram base;
    int s0 = -1;
    std::vector<int> y_state_var;   // per state
    std::vector<int> y_action_var;  // per action
    std::vector<Mec> mecs;
    std::vector<PayoffInterval> bounds;
    std::vector<std::vector<std::pair<int, Rat>>> mec_mass;  // Y_C as coeff rows
};

GlobalSystem build_global_base(const Mdp& mdp, int s0);

/// x_C = clamp(z, alpha_C, beta_C) per MEC, in canonical MEC order.
std::vector<Rat> clamp_xc(const std::vector<PayoffInterval>& bounds, const Rat& z);

/// The linear part of the system L with the x_C variables fixed to
/// clamp(z, alpha_C, beta_C): flow rows, normalization, and the expectation
/// bound u >= sum_C x_C Y_C. The variance bound is handled by the sweep in
/// the checker and is not part of the returned program.
LinearProgram build_system_Lz(const Mdp& mdp, int s0, const Rat& u, const Rat& v, const Rat& z);

/// Lower boundary of the 2D projection {(mean, sq)} of a polytope, as a
/// convex piecewise-linear function of the mean. Breakpoints keep a full
/// variable assignment so witnesses can be reconstructed by interpolation.
struct Envelope {
    struct Point {
        Rat m;
        Rat g;
        std::vector<Rat> assignment;
    };
    std::vector<Point> points;  // sorted by m ascending
    bool empty() const { return points.empty(); }
};

Envelope lower_envelope(const LinearProgram& base,
                        const std::vector<std::pair<int, Rat>>& mean_coeffs,
                        const std::vector<std::pair<int, Rat>>& sq_coeffs);

struct GlobalWitness {
    std::vector<Rat> assignment;   // over the GlobalSystem base variables
    std::vector<Rat> x_per_mec;
    Rat z_bar;
    Rat mean;       // expectation of the induced strategy
    Rat variance;   // exact global variance of the induced strategy
    StochasticUpdateStrategy strategy;
};

struct GlobalCheckResult {
    bool yes = false;
    std::optional<GlobalWitness> witness;
};

/// Decides achievability of (u, v) for global variance up to eps: sweeps
/// z-bar over multiples of tau = eps / (8 max{N,1}) and decides each fixed-x
/// system exactly through the envelope. Yes answers carry a synthesized
/// 2-memory witness.
class GlobalChecker {
  public:
    GlobalChecker(const Mdp& mdp, int s0);

    GlobalCheckResult check(const Rat& u, const Rat& v, const Rat& eps,
                            bool build_witness = true);

    const GlobalSystem& system() const { return sys_; }

  private:
    const Mdp& mdp_;
    int s0_;
    GlobalSystem sys_;
    std::map<std::vector<Rat>, Envelope> envelopes_;

    const Envelope& envelope_for(const std::vector<Rat>& x);
};

GlobalCheckResult approx_check_global(const Mdp& mdp, int s0, const Rat& u, const Rat& v,
                                      const Rat& eps);

/// 2-memory strategy from a feasible transient flow and per-MEC values:
/// memory m1 plays proportionally to y_a and switches at s with probability
/// y_s / (y_s + sum of y_a over Act(s)); memory m2 plays sigma_{x_C}.
StochasticUpdateStrategy synthesize_global(const Mdp& mdp, const GlobalSystem& sys,
                                           const std::vector<Rat>& assignment,
                                           const std::vector<Rat>& x_per_mec);

}  // namespace mdpstab
