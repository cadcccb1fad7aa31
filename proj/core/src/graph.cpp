#include "mdpstab/graph.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace mdpstab {

std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& adjacency) {
    const int n = static_cast<int>(adjacency.size());
    std::vector<int> index(n, -1), low(n, 0), on_stack(n, 0);
    std::vector<int> stack;
    std::vector<std::vector<int>> comps;
    int counter = 0;

    // Iterative Tarjan; frame = (node, next edge position).
    std::vector<std::pair<int, std::size_t>> frames;
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        frames.push_back({root, 0});
        while (!frames.empty()) {
            auto& [v, pos] = frames.back();
            if (pos == 0) {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = 1;
            }
            bool descended = false;
            while (pos < adjacency[v].size()) {
                int w = adjacency[v][pos];
                ++pos;
                if (index[w] < 0) {
                    frames.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], index[w]);
            }
            if (descended) continue;
            if (low[v] == index[v]) {
                std::vector<int> comp;
                while (true) {
                    int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp.push_back(w);
                    if (w == v) break;
                }
                std::sort(comp.begin(), comp.end());
                comps.push_back(std::move(comp));
            }
            int finished = v;
            frames.pop_back();
            if (!frames.empty())
                low[frames.back().first] = std::min(low[frames.back().first], low[finished]);
        }
    }
    std::sort(comps.begin(), comps.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return comps;
}

bool is_end_component(const Mdp& mdp, const std::vector<int>& states,
                      const std::vector<int>& actions) {
    if (states.empty() || actions.empty()) return false;
    std::set<int> st(states.begin(), states.end());
    for (int a : actions) {
        const auto& act = mdp.action(a);
        if (!st.count(act.source)) return false;
        for (const auto& [t, p] : act.transitions) {
            if (!st.count(t)) return false;
            (void)p;
        }
    }
    // Internal strong connectivity through the given actions.
    std::vector<int> pos(mdp.num_states(), -1);
    for (std::size_t i = 0; i < states.size(); ++i) pos[states[i]] = static_cast<int>(i);
    std::vector<std::vector<int>> adj(states.size());
    for (int a : actions)
        for (const auto& [t, p] : mdp.action(a).transitions) {
            adj[pos[mdp.action(a).source]].push_back(pos[t]);
            (void)p;
        }
    auto comps = strongly_connected_components(adj);
    return comps.size() == 1 && comps.front().size() == states.size();
}

/// MEC decomposition restricted to a subset of usable actions. The standard
/// iterated-SCC scheme: prune states without an internal action, split into
/// SCCs of the internal-action graph, repeat to a fixpoint.
std::vector<Mec> mec_decomposition_restricted(const Mdp& mdp,
                                              const std::vector<char>& action_allowed) {
    const int n = mdp.num_states();
    std::vector<std::vector<int>> candidates;
    {
        std::vector<int> all(n);
        for (int s = 0; s < n; ++s) all[s] = s;
        candidates.push_back(std::move(all));
    }

    auto internal_targets = [&](int a, const std::vector<int>& pos) {
        // Returns true when every successor of a stays inside the candidate.
        for (const auto& [t, p] : mdp.action(a).transitions) {
            if (pos[t] < 0) return false;
            (void)p;
        }
        return true;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::vector<int>> next;
        for (auto& cand : candidates) {
            std::vector<int> pos(n, -1);
            for (std::size_t i = 0; i < cand.size(); ++i) pos[cand[i]] = static_cast<int>(i);

            // Prune states with no allowed internal action, to closure.
            bool pruned = true;
            while (pruned) {
                pruned = false;
                for (std::size_t i = 0; i < cand.size(); ++i) {
                    int s = cand[i];
                    if (pos[s] < 0) continue;
                    bool has = false;
                    for (int a : mdp.enabled(s))
                        if (action_allowed[a] && internal_targets(a, pos)) has = true;
                    if (!has) {
                        pos[s] = -1;
                        pruned = true;
                        changed = true;
                    }
                }
            }
            std::vector<int> kept;
            for (int s : cand)
                if (pos[s] >= 0) kept.push_back(s);
            if (kept.empty()) continue;
            for (std::size_t i = 0; i < kept.size(); ++i) pos[kept[i]] = static_cast<int>(i);

            std::vector<std::vector<int>> adj(kept.size());
            for (int s : kept)
                for (int a : mdp.enabled(s))
                    if (action_allowed[a] && internal_targets(a, pos))
                        for (const auto& [t, p] : mdp.action(a).transitions) {
                            adj[pos[s]].push_back(pos[t]);
                            (void)p;
                        }
            auto comps = strongly_connected_components(adj);
            if (comps.size() > 1) changed = true;
            for (const auto& comp : comps) {
                std::vector<int> states;
                for (int i : comp) states.push_back(kept[i]);
                std::sort(states.begin(), states.end());
                if (states.size() != cand.size()) changed = true;
                next.push_back(std::move(states));
            }
        }
        candidates = std::move(next);
    }

    std::vector<Mec> result;
    for (const auto& cand : candidates) {
        std::vector<int> pos(n, -1);
        for (std::size_t i = 0; i < cand.size(); ++i) pos[cand[i]] = static_cast<int>(i);
        Mec mec;
        mec.states = cand;
        for (int s : cand)
            for (int a : mdp.enabled(s))
                if (action_allowed[a] && internal_targets(a, pos)) mec.actions.push_back(a);
        if (mec.actions.empty()) continue;
        std::sort(mec.actions.begin(), mec.actions.end());
        result.push_back(std::move(mec));
    }
    std::sort(result.begin(), result.end(),
              [](const Mec& a, const Mec& b) { return a.states.front() < b.states.front(); });
    return result;
}

std::vector<Mec> mec_decomposition(const Mdp& mdp) {
    return mec_decomposition_restricted(mdp, std::vector<char>(mdp.num_actions(), 1));
}

namespace {

/// States that can reach `target` inside `alive` using only actions whose
/// successors all stay in `alive`.
std::vector<char> safe_positive_reach(const Mdp& mdp, const std::vector<char>& alive,
                                      const std::vector<char>& target) {
    const int n = mdp.num_states();
    std::vector<char> reach(n, 0);
    for (int s = 0; s < n; ++s)
        if (alive[s] && target[s]) reach[s] = 1;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int s = 0; s < n; ++s) {
            if (!alive[s] || reach[s]) continue;
            for (int a : mdp.enabled(s)) {
                bool safe = true, hits = false;
                for (const auto& [t, p] : mdp.action(a).transitions) {
                    if (!alive[t]) safe = false;
                    if (reach[t]) hits = true;
                    (void)p;
                }
                if (safe && hits) {
                    reach[s] = 1;
                    changed = true;
                    break;
                }
            }
        }
    }
    return reach;
}

}  // namespace

AlmostSureResult almost_sure_reach(const Mdp& mdp, const std::vector<int>& target_states) {
    const int n = mdp.num_states();
    std::vector<char> target(n, 0);
    for (int s : target_states) target[s] = 1;

    // Greatest fixpoint: repeatedly drop states that cannot reach the target
    // without risking to leave the current candidate set.
    std::vector<char> alive(n, 1);
    while (true) {
        auto reach = safe_positive_reach(mdp, alive, target);
        bool shrunk = false;
        for (int s = 0; s < n; ++s)
            if (alive[s] && !reach[s]) {
                alive[s] = 0;
                shrunk = true;
            }
        if (!shrunk) break;
    }

    AlmostSureResult res;
    res.witness.choice.assign(n, -1);
    for (int s = 0; s < n; ++s)
        if (alive[s]) res.winning.push_back(s);

    // Witness: among safe actions, shrink BFS distance to the target.
    std::vector<int> dist(n, -1);
    for (int s : res.winning)
        if (target[s]) dist[s] = 0;
    bool progress = true;
    while (progress) {
        progress = false;
        for (int s : res.winning) {
            if (dist[s] >= 0) continue;
            int best = -1, best_d = -1;
            for (int a : mdp.enabled(s)) {
                bool safe = true;
                int d = -1;
                for (const auto& [t, p] : mdp.action(a).transitions) {
                    if (!alive[t]) safe = false;
                    if (dist[t] >= 0 && (d < 0 || dist[t] < d)) d = dist[t];
                    (void)p;
                }
                if (safe && d >= 0 && (best_d < 0 || d < best_d)) {
                    best = a;
                    best_d = d;
                }
            }
            if (best >= 0) {
                dist[s] = best_d + 1;
                res.witness.choice[s] = best;
                progress = true;
            }
        }
    }
    for (int s = 0; s < n; ++s)
        if (res.witness.choice[s] < 0) {
            // Target and losing states: canonical pick, preferring a safe one.
            int pick = mdp.enabled(s).front();
            if (alive[s]) {
                for (int a : mdp.enabled(s)) {
                    bool safe = true;
                    for (const auto& [t, p] : mdp.action(a).transitions) {
                        if (!alive[t]) safe = false;
                        (void)p;
                    }
                    if (safe) {
                        pick = a;
                        break;
                    }
                }
            }
            res.witness.choice[s] = pick;
        }
    return res;
}

AlmostSureResult almost_sure_cobuchi(const Mdp& mdp, const std::vector<int>& allowed_actions) {
    std::vector<char> allowed(mdp.num_actions(), 0);
    for (int a : allowed_actions) allowed[a] = 1;
    auto mecs = mec_decomposition_restricted(mdp, allowed);

    std::vector<int> core;
    std::vector<int> internal_action(mdp.num_states(), -1);
    for (const Mec& mec : mecs) {
        std::set<int> st(mec.states.begin(), mec.states.end());
        for (int s : mec.states) {
            core.push_back(s);
            for (int a : mec.actions)
                if (mdp.action(a).source == s && internal_action[s] < 0) internal_action[s] = a;
        }
        (void)st;
    }
    std::sort(core.begin(), core.end());

    AlmostSureResult res = almost_sure_reach(mdp, core);
    // Inside a restricted MEC, keep playing its internal allowed action.
    for (int s : core) res.witness.choice[s] = internal_action[s];
    return res;
}

std::vector<Bscc> bsccs(const MarkovChain& chain) {
    std::vector<std::vector<int>> adj(chain.num_locations());
    for (int i = 0; i < chain.num_locations(); ++i)
        for (const auto& [j, p] : chain.edges[i]) {
            adj[i].push_back(j);
            (void)p;
        }
    std::vector<Bscc> result;
    for (auto& comp : strongly_connected_components(adj)) {
        std::set<int> members(comp.begin(), comp.end());
        bool bottom = true;
        for (int i : comp)
            for (int j : adj[i])
                if (!members.count(j)) bottom = false;
        if (bottom) result.push_back(Bscc{std::move(comp)});
    }
    return result;
}

}  // namespace mdpstab
