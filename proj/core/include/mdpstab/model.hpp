#pragma once

#include "mdpstab/rational.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mdpstab {

/// Raised by model validation. `kind` is one of EmptyActSet, BadDistribution,
/// UnknownTarget, DuplicateId, NotAMec, BadStrategy.
struct ModelError : std::runtime_error {
    std::string kind;
    ModelError(std::string k, const std::string& what)
        : std::runtime_error(k + ": " + what), kind(std::move(k)) {}
};

struct RawAction {
    std::string id;
    std::string source;
    Rat reward;
    std::vector<std::pair<std::string, Rat>> transitions;
};

/// Model description as parsed from a file, before validation.
struct RawMdp {
    std::vector<std::string> states;
    std::string initial;
    std::vector<RawAction> actions;
};

/// Validated MDP. States and actions are kept in canonical (lexicographic)
/// order and referred to by index. Immutable after validation.
class Mdp {
  public:
    struct Action {
        std::string id;
        int source = -1;
        Rat reward;
        std::vector<std::pair<int, Rat>> transitions;  // (target state, prob)
    };

    int num_states() const { return static_cast<int>(state_names_.size()); }
    int num_actions() const { return static_cast<int>(actions_.size()); }
    int initial_state() const { return initial_; }

    const std::string& state_name(int s) const { return state_names_[s]; }
    const Action& action(int a) const { return actions_[a]; }
    const std::vector<int>& enabled(int s) const { return enabled_[s]; }

    int state_index(const std::string& name) const;  // -1 when unknown
    int action_index(const std::string& id) const;

    Rat min_reward() const;
    Rat max_reward() const;
    /// N = max |r(a)|, the grid constant of the approximation algorithms.
    Rat max_abs_reward() const;

    friend Mdp validate_mdp(const RawMdp& raw);

  private:
    std::vector<std::string> state_names_;
    std::vector<Action> actions_;
    std::vector<std::vector<int>> enabled_;
    int initial_ = -1;
};

/// Checks the model invariants (nonempty action sets, one source per action,
/// distributions summing to one, known targets) and canonicalizes ordering.
Mdp validate_mdp(const RawMdp& raw);

/// Sparse probability distribution over indices; entries carry positive mass.
using Dist = std::vector<std::pair<int, Rat>>;

bool is_distribution(const Dist& d);

struct MemorylessDeterministicStrategy {
    std::vector<int> choice;  // per state, an enabled action index
};

/// Finite-memory strategy with stochastic memory updates. Dense tables:
/// next_move[s][m] is a distribution over enabled actions of s, and
/// memory_update[a][t][m] a distribution over memory elements, applied when
/// action a lands in state t while memory is m.
struct StochasticUpdateStrategy {
    std::vector<std::string> memory;
    Dist initial_memory;
    std::vector<std::vector<Dist>> next_move;      // [state][memory]
    std::vector<std::vector<std::vector<Dist>>> memory_update;  // [action][state][memory]

    int memory_size() const { return static_cast<int>(memory.size()); }
};

/// Throws BadStrategy when the strategy does not fit the MDP.
void validate_strategy(const Mdp& mdp, const StochasticUpdateStrategy& strategy);

/// Lifts a memoryless deterministic strategy into the common representation.
StochasticUpdateStrategy lift(const Mdp& mdp, const MemorylessDeterministicStrategy& md);

/// Lifts a memoryless randomized strategy (per-state action distribution).
StochasticUpdateStrategy lift_randomized(const Mdp& mdp, const std::vector<Dist>& per_state);

/// Finite Markov chain over (state, memory, action) locations.
struct MarkovChain {
    struct Location {
        int state, memory, action;
        bool operator<(const Location& o) const {
            if (state != o.state) return state < o.state;
            if (memory != o.memory) return memory < o.memory;
            return action < o.action;
        }
        bool operator==(const Location& o) const {
            return state == o.state && memory == o.memory && action == o.action;
        }
    };

    std::vector<Location> locations;  // canonical order
    Dist initial;                     // over location indices
    std::vector<std::vector<std::pair<int, Rat>>> edges;
    std::vector<Rat> reward;          // r(action of the location)

    int num_locations() const { return static_cast<int>(locations.size()); }
    int find(const Location& loc) const;
};

/// The play of `mdp` under `strategy` started in `start`: locations reachable
/// from the initial distribution mu(s,m,a) = alpha(m) * sigma_n(s,m)(a), with
/// edge probability delta(a)(t') * sigma_u(a,t',m)(m') * sigma_n(t',m')(a').
MarkovChain induce_chain(const Mdp& mdp, const StochasticUpdateStrategy& strategy, int start);

struct Mec;  // graph.hpp

/// Sub-MDP consisting exactly of the MEC's states and actions, plus the
/// index mapping back into the parent MDP. Throws NotAMec.
struct MecRestriction {
    Mdp mdp;
    std::vector<int> state_to_parent;
    std::vector<int> action_to_parent;
};
MecRestriction restrict_to_mec(const Mdp& mdp, const Mec& mec);

}  // namespace mdpstab
