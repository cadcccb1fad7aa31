#pragma once

#include "mdpstab/markov.hpp"

#include <optional>

namespace mdpstab {

struct ZeroVarAnswer {
    std::optional<Rat> value;  // empty means NO
    std::optional<StochasticUpdateStrategy> witness;
    bool no() const { return !value.has_value(); }
};

/// Per-state minimal expectation ensurable with zero hybrid variance
/// (nullopt = impossible), with the per-state action of the witness for the
/// state's own reward class.
struct BetaFunction {
    std::vector<std::optional<Rat>> beta;
    std::vector<int> witness_action;  // valid where beta is finite
    std::vector<int> class_index;     // index into the sorted reward classes
};

BetaFunction zero_hybrid_all(const Mdp& mdp);

/// Least reward class whose actions can almost surely be played from some
/// point on; the witness is memoryless pure.
ZeroVarAnswer zero_hybrid(const Mdp& mdp, int s0);

/// Reachability of zero-hybrid states with minimal switch cost; witness is a
/// 2-memory pure strategy (reach phase, then the frozen class witness).
ZeroVarAnswer zero_local(const Mdp& mdp, int s0);

/// Least alpha_C reachable almost surely among MECs whose payoff interval
/// contains it; witness reaches the MECs and then plays sigma_{l} inside.
ZeroVarAnswer zero_global(const Mdp& mdp, int s0);

}  // namespace mdpstab
