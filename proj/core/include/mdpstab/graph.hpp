#pragma once

#include "mdpstab/model.hpp"

#include <vector>

namespace mdpstab {

/// Maximal end component: a closed, internally strongly connected
/// state/action pair. Both sets sorted ascending.
struct Mec {
    std::vector<int> states;
    std::vector<int> actions;
};

struct Bscc {
    std::vector<int> locations;  // sorted indices into a MarkovChain
};

/// MEC decomposition by iterated SCC computation with action pruning.
/// Result sorted by smallest member state.
std::vector<Mec> mec_decomposition(const Mdp& mdp);

/// Same, considering only the actions marked in `action_allowed`.
std::vector<Mec> mec_decomposition_restricted(const Mdp& mdp,
                                              const std::vector<char>& action_allowed);

/// True when (states, actions) forms an end component of mdp.
bool is_end_component(const Mdp& mdp, const std::vector<int>& states,
                      const std::vector<int>& actions);

struct AlmostSureResult {
    std::vector<int> winning;                  // sorted state indices
    MemorylessDeterministicStrategy witness;   // total; canonical outside winning
};

/// States from which target can be reached with probability 1, with a
/// memoryless pure witness winning from every winning state.
AlmostSureResult almost_sure_reach(const Mdp& mdp, const std::vector<int>& target_states);

/// States from which some strategy ensures that from some point on only
/// `allowed` actions occur (almost surely). Reduced to almost-sure
/// reachability of the MECs of the allowed-restricted sub-MDP.
AlmostSureResult almost_sure_cobuchi(const Mdp& mdp, const std::vector<int>& allowed_actions);

/// Bottom strongly connected components of the chain's edge graph.
std::vector<Bscc> bsccs(const MarkovChain& chain);

/// Strongly connected components of an arbitrary adjacency list
/// (Tarjan, iterative). Components are returned sorted by smallest member.
std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& adjacency);

}  // namespace mdpstab
