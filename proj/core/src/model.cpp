#include "mdpstab/model.hpp"

#include "mdpstab/graph.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

namespace mdpstab {

int Mdp::state_index(const std::string& name) const {
    auto it = std::lower_bound(state_names_.begin(), state_names_.end(), name);
    if (it == state_names_.end() || *it != name) return -1;
    return static_cast<int>(it - state_names_.begin());
}

int Mdp::action_index(const std::string& id) const {
    for (int a = 0; a < num_actions(); ++a)
        if (actions_[a].id == id) return a;
    return -1;
}

Rat Mdp::min_reward() const {
    Rat m = actions_.front().reward;
    for (const auto& a : actions_) m = rat_min(m, a.reward);
    return m;
}

Rat Mdp::max_reward() const {
    Rat m = actions_.front().reward;
    for (const auto& a : actions_) m = rat_max(m, a.reward);
    return m;
}

Rat Mdp::max_abs_reward() const {
    Rat m = 0;
    for (const auto& a : actions_) m = rat_max(m, rat_abs(a.reward));
    return m;
}

Mdp validate_mdp(const RawMdp& raw) {
    Mdp mdp;
    {
        std::set<std::string> seen;
        for (const auto& s : raw.states)
            if (!seen.insert(s).second) throw ModelError("DuplicateId", "state " + s);
    }
    mdp.state_names_ = raw.states;
    std::sort(mdp.state_names_.begin(), mdp.state_names_.end());

    mdp.initial_ = mdp.state_index(raw.initial);
    if (mdp.initial_ < 0) throw ModelError("UnknownTarget", "initial state " + raw.initial);

    std::vector<RawAction> sorted_actions = raw.actions;
    std::sort(sorted_actions.begin(), sorted_actions.end(),
              [](const RawAction& a, const RawAction& b) { return a.id < b.id; });
    {
        std::set<std::string> seen;
        for (const auto& a : sorted_actions)
            if (!seen.insert(a.id).second) throw ModelError("DuplicateId", "action " + a.id);
    }

    mdp.enabled_.assign(mdp.state_names_.size(), {});
    for (const auto& ra : sorted_actions) {
        Mdp::Action act;
        act.id = ra.id;
        act.source = mdp.state_index(ra.source);
        if (act.source < 0) throw ModelError("UnknownTarget", "source of action " + ra.id);
        act.reward = ra.reward;
        Rat sum = 0;
        std::map<int, Rat> merged;
        for (const auto& [target, p] : ra.transitions) {
            int t = mdp.state_index(target);
            if (t < 0) throw ModelError("UnknownTarget", "action " + ra.id + " -> " + target);
            if (p <= 0)
                throw ModelError("BadDistribution",
                                 "action " + ra.id + " has non-positive probability");
            merged[t] += p;
            sum += p;
        }
        if (sum != 1)
            throw ModelError("BadDistribution",
                             "action " + ra.id + " sums to " + format_rational(sum));
        act.transitions.assign(merged.begin(), merged.end());
        int idx = static_cast<int>(mdp.actions_.size());
        mdp.actions_.push_back(std::move(act));
        mdp.enabled_[mdp.actions_[idx].source].push_back(idx);
    }

    for (int s = 0; s < mdp.num_states(); ++s)
        if (mdp.enabled_[s].empty())
            throw ModelError("EmptyActSet", "state " + mdp.state_names_[s]);
    return mdp;
}

bool is_distribution(const Dist& d) {
    Rat sum = 0;
    for (const auto& [i, p] : d) {
        if (p <= 0) return false;
        sum += p;
        (void)i;
    }
    return sum == 1;
}

void validate_strategy(const Mdp& mdp, const StochasticUpdateStrategy& strategy) {
    const int M = strategy.memory_size();
    if (M < 1) throw ModelError("BadStrategy", "empty memory set");
    if (!is_distribution(strategy.initial_memory))
        throw ModelError("BadStrategy", "initial memory distribution");
    for (const auto& [m, p] : strategy.initial_memory)
        if (m < 0 || m >= M) throw ModelError("BadStrategy", "initial memory index");

    if (static_cast<int>(strategy.next_move.size()) != mdp.num_states())
        throw ModelError("BadStrategy", "next_move table size");
    for (int s = 0; s < mdp.num_states(); ++s) {
        if (static_cast<int>(strategy.next_move[s].size()) != M)
            throw ModelError("BadStrategy", "next_move memory size at " + mdp.state_name(s));
        for (int m = 0; m < M; ++m) {
            const Dist& d = strategy.next_move[s][m];
            if (!is_distribution(d))
                throw ModelError("BadStrategy", "next_move distribution at " + mdp.state_name(s));
            for (const auto& [a, p] : d) {
                const auto& en = mdp.enabled(s);
                if (std::find(en.begin(), en.end(), a) == en.end())
                    throw ModelError("BadStrategy",
                                     "next_move uses disabled action at " + mdp.state_name(s));
                (void)p;
            }
        }
    }

    if (static_cast<int>(strategy.memory_update.size()) != mdp.num_actions())
        throw ModelError("BadStrategy", "memory_update table size");
    for (int a = 0; a < mdp.num_actions(); ++a) {
        if (static_cast<int>(strategy.memory_update[a].size()) != mdp.num_states())
            throw ModelError("BadStrategy", "memory_update state size");
        for (int t = 0; t < mdp.num_states(); ++t)
            for (int m = 0; m < M; ++m) {
                const Dist& d = strategy.memory_update[a][t][m];
                if (!is_distribution(d))
                    throw ModelError("BadStrategy", "memory_update distribution");
                for (const auto& [m2, p] : d) {
                    if (m2 < 0 || m2 >= M)
                        throw ModelError("BadStrategy", "memory_update index");
                    (void)p;
                }
            }
    }
}

namespace {

std::vector<std::vector<std::vector<Dist>>> identity_update(const Mdp& mdp, int memories) {
    std::vector<std::vector<std::vector<Dist>>> upd(
        mdp.num_actions(),
        std::vector<std::vector<Dist>>(mdp.num_states(), std::vector<Dist>(memories)));
    for (int a = 0; a < mdp.num_actions(); ++a)
        for (int t = 0; t < mdp.num_states(); ++t)
            for (int m = 0; m < memories; ++m) upd[a][t][m] = {{m, Rat(1)}};
    return upd;
}

}  // namespace

StochasticUpdateStrategy lift(const Mdp& mdp, const MemorylessDeterministicStrategy& md) {
    StochasticUpdateStrategy s;
    s.memory = {"m"};
    s.initial_memory = {{0, Rat(1)}};
    s.next_move.assign(mdp.num_states(), std::vector<Dist>(1));
    for (int st = 0; st < mdp.num_states(); ++st)
        s.next_move[st][0] = {{md.choice[st], Rat(1)}};
    s.memory_update = identity_update(mdp, 1);
    return s;
}

StochasticUpdateStrategy lift_randomized(const Mdp& mdp, const std::vector<Dist>& per_state) {
    StochasticUpdateStrategy s;
    s.memory = {"m"};
    s.initial_memory = {{0, Rat(1)}};
    s.next_move.assign(mdp.num_states(), std::vector<Dist>(1));
    for (int st = 0; st < mdp.num_states(); ++st) s.next_move[st][0] = per_state[st];
    s.memory_update = identity_update(mdp, 1);
    return s;
}

int MarkovChain::find(const Location& loc) const {
    auto it = std::lower_bound(locations.begin(), locations.end(), loc);
    if (it == locations.end() || !(*it == loc)) return -1;
    return static_cast<int>(it - locations.begin());
}

MarkovChain induce_chain(const Mdp& mdp, const StochasticUpdateStrategy& strategy, int start) {
    validate_strategy(mdp, strategy);

    using Loc = MarkovChain::Location;
    std::map<Loc, Dist> out;  // discovered locations with outgoing edges (by location)
    std::vector<std::pair<Loc, Rat>> initial;

    std::queue<Loc> frontier;
    auto discover = [&](const Loc& l) {
        if (out.emplace(l, Dist{}).second) frontier.push(l);
    };

    for (const auto& [m, pm] : strategy.initial_memory)
        for (const auto& [a, pa] : strategy.next_move[start][m]) {
            Loc l{start, m, a};
            initial.push_back({l, pm * pa});
            discover(l);
        }

    std::map<Loc, std::vector<std::pair<Loc, Rat>>> edges;
    while (!frontier.empty()) {
        Loc l = frontier.front();
        frontier.pop();
        auto& row = edges[l];
        for (const auto& [t, pt] : mdp.action(l.action).transitions)
            for (const auto& [m2, pm] : strategy.memory_update[l.action][t][l.memory])
                for (const auto& [a2, pa] : strategy.next_move[t][m2]) {
                    Loc nxt{t, m2, a2};
                    row.push_back({nxt, pt * pm * pa});
                    discover(nxt);
                }
    }

    MarkovChain chain;
    chain.locations.reserve(out.size());
    for (const auto& [l, _] : out) chain.locations.push_back(l);
    // std::map iterates in canonical (sorted) order already.
    chain.edges.assign(chain.locations.size(), {});
    chain.reward.resize(chain.locations.size());
    for (int i = 0; i < chain.num_locations(); ++i)
        chain.reward[i] = mdp.action(chain.locations[i].action).reward;
    for (const auto& [l, row] : edges) {
        int i = chain.find(l);
        std::map<int, Rat> merged;
        for (const auto& [tgt, p] : row) merged[chain.find(tgt)] += p;
        chain.edges[i].assign(merged.begin(), merged.end());
    }
    {
        std::map<int, Rat> merged;
        for (const auto& [l, p] : initial) merged[chain.find(l)] += p;
        chain.initial.assign(merged.begin(), merged.end());
    }
    return chain;
}

MecRestriction restrict_to_mec(const Mdp& mdp, const Mec& mec) {
    if (!is_end_component(mdp, mec.states, mec.actions))
        throw ModelError("NotAMec", "not an end component");
    // Maximality: the decomposition MEC containing these states must match.
    for (const Mec& m : mec_decomposition(mdp)) {
        if (std::find(m.states.begin(), m.states.end(), mec.states.front()) == m.states.end())
            continue;
        if (m.states != mec.states || m.actions != mec.actions)
            throw ModelError("NotAMec", "end component is not maximal");
        break;
    }

    RawMdp raw;
    for (int s : mec.states) raw.states.push_back(mdp.state_name(s));
    raw.initial = mdp.state_name(mec.states.front());
    for (int a : mec.actions) {
        const auto& act = mdp.action(a);
        RawAction ra;
        ra.id = act.id;
        ra.source = mdp.state_name(act.source);
        ra.reward = act.reward;
        for (const auto& [t, p] : act.transitions)
            ra.transitions.push_back({mdp.state_name(t), p});
        raw.actions.push_back(std::move(ra));
    }
    MecRestriction res{validate_mdp(raw), {}, {}};
    for (int s = 0; s < res.mdp.num_states(); ++s)
        res.state_to_parent.push_back(mdp.state_index(res.mdp.state_name(s)));
    for (int a = 0; a < res.mdp.num_actions(); ++a)
        res.action_to_parent.push_back(mdp.action_index(res.mdp.action(a).id));
    return res;
}

}  // namespace mdpstab
