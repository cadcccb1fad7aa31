#pragma once

#include "mdpstab/model.hpp"

#include <string>

namespace mdpstab {

/// Parses the MDP JSON format:
///   {"states":["s1",...], "initial":"s1",
///    "actions":[{"id":"a","source":"s1","reward":"0",
///                "transitions":{"s2":"1/2","s3":"0.5"}}]}
/// Rewards and probabilities accept "p/q" or decimal strings (or numbers).
/// Throws ModelError on malformed input or invariant violations.
Mdp mdp_from_json_text(const std::string& text);
Mdp load_mdp(const std::string& path);

std::string mdp_to_json_text(const Mdp& mdp);

/// Strategy files mirror the StochasticUpdateStrategy fields:
///   {"memory":["m1","m2"], "initial_memory":{"m1":"1"},
///    "next_move":[{"state":"s1","memory":"m1","distribution":{"a":"1"}}],
///    "memory_update":[{"action":"c","state":"s3","memory":"m1",
///                      "distribution":{"m2":"1"}}]}
/// Omitted next_move entries default to the first enabled action; omitted
/// memory_update entries keep the memory unchanged.
StochasticUpdateStrategy strategy_from_json_text(const Mdp& mdp, const std::string& text);
StochasticUpdateStrategy load_strategy(const Mdp& mdp, const std::string& path);

std::string strategy_to_json_text(const Mdp& mdp, const StochasticUpdateStrategy& strategy);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace mdpstab
