#pragma once

#include "mdpstab/model.hpp"

namespace mdpstab::fixtures {

/// Four-state MDP with three reward loops (4, 5, 0) behind a fair split:
///   s1 -a,0-> {s2: 1/2, s3: 1/2}; s2 -b,4-> s2; s3 -c,5-> s3;
///   s3 -d,0-> s4; s4 -e,0-> s4.
Mdp m_glob();

/// Two-state unichain: s1 -a,0-> s2, s1 -b,2-> s2, s2 -c,2-> s1.
Mdp m_uni();

/// 2-memory strategy on m_glob: first visit to s3 plays c w.p. 4/5 and
/// d w.p. 1/5, afterwards c surely. Achieves (E, Var) = (4, 2) from s1.
StochasticUpdateStrategy glob_first_visit_strategy(const Mdp& m_glob);

/// 2-memory strategy on m_uni: commits uniformly at the first step of s1 to
/// always-b or always-a. Achieves (E[mp], E[lv]) = (3/2, 1/2) from s1.
StochasticUpdateStrategy uni_commit_strategy(const Mdp& m_uni);

/// Memoryless strategy on m_uni choosing uniformly between a and b.
StochasticUpdateStrategy uni_uniform_strategy(const Mdp& m_uni);

/// Memoryless deterministic strategy by action ids, one per state in
/// canonical state order.
MemorylessDeterministicStrategy md_by_ids(const Mdp& mdp,
                                          const std::vector<std::string>& action_ids);

}  // namespace mdpstab::fixtures
