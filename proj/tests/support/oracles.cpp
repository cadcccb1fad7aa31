#include "support/oracles.hpp"

#include "mdpstab/global.hpp"
#include "mdpstab/markov.hpp"

#include <algorithm>
#include <set>

namespace mdpstab::oracles {

std::vector<Mec> brute_force_mecs(const Mdp& mdp) {
    const int n = mdp.num_states();
    const int m = mdp.num_actions();
    std::vector<Mec> ecs;
    for (unsigned ts = 1; ts < (1u << n); ++ts) {
        std::vector<int> states;
        for (int s = 0; s < n; ++s)
            if (ts & (1u << s)) states.push_back(s);
        std::vector<int> usable;
        for (int a = 0; a < m; ++a)
            if (ts & (1u << mdp.action(a).source)) usable.push_back(a);
        for (unsigned bs = 1; bs < (1u << usable.size()); ++bs) {
            std::vector<int> actions;
            for (std::size_t i = 0; i < usable.size(); ++i)
                if (bs & (1u << i)) actions.push_back(usable[i]);
            if (is_end_component(mdp, states, actions)) ecs.push_back(Mec{states, actions});
        }
    }
    // Keep the subset-maximal end components.
    auto contains = [](const std::vector<int>& big, const std::vector<int>& small) {
        return std::includes(big.begin(), big.end(), small.begin(), small.end());
    };
    std::vector<Mec> maximal;
    for (const Mec& cand : ecs) {
        bool dominated = false;
        for (const Mec& other : ecs)
            if ((other.states != cand.states || other.actions != cand.actions) &&
                contains(other.states, cand.states) && contains(other.actions, cand.actions))
                dominated = true;
        if (dominated) continue;
        bool seen = false;
        for (const Mec& kept : maximal)
            if (kept.states == cand.states && kept.actions == cand.actions) seen = true;
        if (!seen) maximal.push_back(cand);
    }
    std::sort(maximal.begin(), maximal.end(),
              [](const Mec& a, const Mec& b) { return a.states.front() < b.states.front(); });
    return maximal;
}

VertexOracleResult vertex_enumeration_lp(const LinearProgram& lp) {
    const int n = lp.num_variables();
    struct Plane {
        std::vector<Rat> coeffs;
        Rat rhs;
    };
    std::vector<Plane> planes;
    for (const auto& row : lp.rows) {
        Plane p{std::vector<Rat>(n, 0), row.rhs};
        for (const auto& [v, c] : row.coeffs) p.coeffs[v] += c;
        planes.push_back(std::move(p));
    }
    for (int v = 0; v < n; ++v) {
        if (!lp.nonneg[v]) continue;
        Plane p{std::vector<Rat>(n, 0), Rat(0)};
        p.coeffs[v] = 1;
        planes.push_back(std::move(p));
    }

    auto feasible = [&](const std::vector<Rat>& x) {
        for (const auto& row : lp.rows) {
            Rat lhs = 0;
            for (const auto& [v, c] : row.coeffs) lhs += c * x[v];
            if (row.rel == Rel::Le && lhs > row.rhs) return false;
            if (row.rel == Rel::Ge && lhs < row.rhs) return false;
            if (row.rel == Rel::Eq && lhs != row.rhs) return false;
        }
        for (int v = 0; v < n; ++v)
            if (lp.nonneg[v] && x[v] < 0) return false;
        return true;
    };

    std::optional<Rat> best;
    bool any_feasible = false;
    const int total = static_cast<int>(planes.size());

    // All n-subsets of planes; singular systems are skipped.
    auto evaluate = [&](const std::vector<int>& chosen) {
        std::vector<std::vector<Rat>> a(n, std::vector<Rat>(n));
        std::vector<Rat> b(n);
        for (int i = 0; i < n; ++i) {
            a[i] = planes[chosen[i]].coeffs;
            b[i] = planes[chosen[i]].rhs;
        }
        std::vector<Rat> x;
        try {
            x = solve_linear_system(std::move(a), std::move(b));
        } catch (const std::exception&) {
            return;
        }
        if (!feasible(x)) return;
        any_feasible = true;
        if (lp.objective) {
            Rat val = 0;
            for (const auto& [v, c] : lp.objective->coeffs) val += c * x[v];
            if (!best)
                best = val;
            else if (lp.objective->maximize)
                best = rat_max(*best, val);
            else
                best = rat_min(*best, val);
        }
    };

    std::vector<int> chosen;
    auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(chosen.size()) == n) {
            evaluate(chosen);
            return;
        }
        for (int i = start; i < total; ++i) {
            chosen.push_back(i);
            self(self, i + 1);
            chosen.pop_back();
        }
    };
    if (n > 0) rec(rec, 0);

    if (!any_feasible) return {LpStatus::Infeasible, std::nullopt};
    return {LpStatus::Optimal, best};
}

namespace {

std::vector<Rat> random_split(std::mt19937_64& rng, int parts) {
    // Fixed small-denominator splits keep the arithmetic readable.
    static const std::vector<std::vector<std::vector<int>>> tables = {
        {{1}},                      // 1 part
        {{1, 1}, {1, 2}, {1, 3}},   // 2 parts: 1/2+1/2, 1/3+2/3, 1/4+3/4
        {{1, 1, 1}, {1, 1, 2}},     // 3 parts
    };
    const auto& options = tables[parts - 1];
    const auto& weights = options[rng() % options.size()];
    int total = 0;
    for (int w : weights) total += w;
    std::vector<Rat> probs;
    for (int w : weights) probs.push_back(Rat(w, total));
    return probs;
}

}  // namespace

Mdp random_mdp(std::mt19937_64& rng, int max_states, int max_actions, int max_reward) {
    const int n = 1 + static_cast<int>(rng() % max_states);
    RawMdp raw;
    for (int s = 0; s < n; ++s) raw.states.push_back("q" + std::to_string(s));
    raw.initial = raw.states[rng() % n];

    int actions = n + static_cast<int>(rng() % std::max(1, max_actions - n + 1));
    actions = std::min(actions, max_actions);
    int id = 0;
    auto add_action = [&](int source) {
        RawAction a;
        a.id = "x" + std::to_string(id++);
        a.source = raw.states[source];
        a.reward = Rat(static_cast<long>(rng() % (2 * max_reward + 1)) - max_reward);
        int parts = 1 + static_cast<int>(rng() % std::min(3, n));
        std::set<int> targets;
        while (static_cast<int>(targets.size()) < parts) targets.insert(rng() % n);
        auto split = random_split(rng, parts);
        int i = 0;
        for (int t : targets) a.transitions.push_back({raw.states[t], split[i++]});
        raw.actions.push_back(std::move(a));
    };
    for (int s = 0; s < n; ++s) add_action(s);
    for (int extra = n; extra < actions; ++extra) add_action(rng() % n);
    return validate_mdp(raw);
}

Mdp random_strongly_connected_mdp(std::mt19937_64& rng, int max_states, int max_extra_actions,
                                  int max_reward) {
    const int n = 1 + static_cast<int>(rng() % max_states);
    RawMdp raw;
    for (int s = 0; s < n; ++s) raw.states.push_back("q" + std::to_string(s));
    raw.initial = raw.states[0];
    int id = 0;
    for (int s = 0; s < n; ++s) {
        RawAction a;
        a.id = "x" + std::to_string(id++);
        a.source = raw.states[s];
        a.reward = Rat(static_cast<long>(rng() % (2 * max_reward + 1)) - max_reward);
        a.transitions = {{raw.states[(s + 1) % n], Rat(1)}};
        raw.actions.push_back(std::move(a));
    }
    int extra = static_cast<int>(rng() % (max_extra_actions + 1));
    for (int k = 0; k < extra; ++k) {
        RawAction a;
        a.id = "x" + std::to_string(id++);
        a.source = raw.states[rng() % n];
        a.reward = Rat(static_cast<long>(rng() % (2 * max_reward + 1)) - max_reward);
        int parts = 1 + static_cast<int>(rng() % std::min(2, n));
        std::set<int> targets;
        while (static_cast<int>(targets.size()) < parts) targets.insert(rng() % n);
        auto split = random_split(rng, parts);
        int i = 0;
        for (int t : targets) a.transitions.push_back({raw.states[t], split[i++]});
        raw.actions.push_back(std::move(a));
    }
    return validate_mdp(raw);
}

LinearProgram random_bounded_lp(std::mt19937_64& rng, int max_vars) {
    LinearProgram lp;
    const int n = 1 + static_cast<int>(rng() % max_vars);
    for (int v = 0; v < n; ++v) lp.add_variable("x" + std::to_string(v));
    for (int v = 0; v < n; ++v)
        lp.add_row({{v, Rat(1)}}, Rel::Le, Rat(1 + static_cast<long>(rng() % 5)));
    int extra_rows = 1 + static_cast<int>(rng() % 3);
    for (int r = 0; r < extra_rows; ++r) {
        std::vector<std::pair<int, Rat>> row;
        for (int v = 0; v < n; ++v) {
            long c = static_cast<long>(rng() % 7) - 3;
            if (c != 0) row.push_back({v, Rat(c)});
        }
        if (row.empty()) row.push_back({0, Rat(1)});
        Rel rel = (rng() % 3 == 0) ? Rel::Ge : Rel::Le;
        lp.add_row(std::move(row), rel, Rat(static_cast<long>(rng() % 9) - 2));
    }
    LinearProgram::Objective obj;
    obj.maximize = rng() % 2 == 0;
    for (int v = 0; v < n; ++v) {
        long c = static_cast<long>(rng() % 9) - 4;
        if (c != 0) obj.coeffs.push_back({v, Rat(c)});
    }
    if (obj.coeffs.empty()) obj.coeffs.push_back({0, Rat(1)});
    lp.objective = obj;
    return lp;
}

std::vector<std::pair<Rat, Rat>> discretized_global_points(const Mdp& mdp, int s0) {
    auto mecs = mec_decomposition(mdp);
    std::vector<PayoffInterval> bounds;
    std::vector<std::vector<Dist>> sigma_mid;  // per MEC, on parent indices
    std::vector<char> in_mec_state(mdp.num_states(), 0);
    std::vector<int> mec_of_state(mdp.num_states(), -1);
    for (std::size_t c = 0; c < mecs.size(); ++c) {
        bounds.push_back(mec_payoff_bounds(mdp, mecs[c]));
        auto restriction = restrict_to_mec(mdp, mecs[c]);
        Rat mid = (bounds[c].alpha + bounds[c].beta) / 2;
        MecStrategy inner = sigma_zc(restriction.mdp, mid);
        std::vector<Dist> mapped(mdp.num_states());
        for (int ls = 0; ls < restriction.mdp.num_states(); ++ls) {
            Dist d;
            for (const auto& [la, p] : inner.per_state[ls])
                d.push_back({restriction.action_to_parent[la], p});
            std::sort(d.begin(), d.end());
            mapped[restriction.state_to_parent[ls]] = std::move(d);
        }
        sigma_mid.push_back(std::move(mapped));
        for (int s : mecs[c].states) {
            in_mec_state[s] = 1;
            mec_of_state[s] = static_cast<int>(c);
        }
    }

    // Enumerate m1 action subsets per state and switch flags per MEC state.
    std::vector<unsigned> subset(mdp.num_states(), 1);
    std::vector<std::pair<Rat, Rat>> points;

    std::vector<int> mec_states;
    for (int s = 0; s < mdp.num_states(); ++s)
        if (in_mec_state[s]) mec_states.push_back(s);

    auto z_grid = [&](std::size_t c) {
        std::vector<Rat> zs{bounds[c].alpha};
        if (bounds[c].beta != bounds[c].alpha) {
            zs.push_back((bounds[c].alpha + bounds[c].beta) / 2);
            zs.push_back(bounds[c].beta);
        }
        return zs;
    };

    auto emit_points = [&](const StochasticUpdateStrategy& st) {
        auto chain = induce_chain(mdp, st, s0);
        auto analysis = analyze_chain(chain);
        // Group BSCC trap mass: per MEC for switched components, standalone
        // for m1 components (their means do not depend on the z choices).
        std::vector<Rat> mec_mass(mecs.size(), 0);
        std::vector<std::pair<Rat, Rat>> fixed;  // (mass, mean) of m1 BSCCs
        for (std::size_t b = 0; b < analysis.components.size(); ++b) {
            int loc0 = analysis.components[b].locations.front();
            const auto& loc = chain.locations[loc0];
            if (loc.memory == 1) {
                mec_mass[mec_of_state[loc.state]] += analysis.trap_probability[b];
            } else {
                fixed.push_back({analysis.trap_probability[b], analysis.mean[b]});
            }
        }
        // Close over all z-vector combinations algebraically.
        std::vector<std::vector<Rat>> grids;
        for (std::size_t c = 0; c < mecs.size(); ++c) grids.push_back(z_grid(c));
        std::vector<std::size_t> pick(mecs.size(), 0);
        while (true) {
            Rat mean = 0, second = 0;
            for (const auto& [mass, mu] : fixed) {
                mean += mass * mu;
                second += mass * mu * mu;
            }
            for (std::size_t c = 0; c < mecs.size(); ++c) {
                const Rat& z = grids[c][pick[c]];
                mean += mec_mass[c] * z;
                second += mec_mass[c] * z * z;
            }
            points.push_back({mean, second - mean * mean});
            std::size_t i = 0;
            while (i < mecs.size() && ++pick[i] == grids[i].size()) pick[i++] = 0;
            if (i == mecs.size()) break;
        }
    };

    auto build_and_emit = [&](const std::vector<unsigned>& subsets, unsigned switch_mask) {
        StochasticUpdateStrategy st;
        st.memory = {"m1", "m2"};
        st.next_move.assign(mdp.num_states(), std::vector<Dist>(2));
        st.memory_update.assign(
            mdp.num_actions(),
            std::vector<std::vector<Dist>>(mdp.num_states(), std::vector<Dist>(2)));
        std::vector<char> switch_at(mdp.num_states(), 0);
        for (std::size_t i = 0; i < mec_states.size(); ++i)
            if (switch_mask & (1u << i)) switch_at[mec_states[i]] = 1;
        for (int s = 0; s < mdp.num_states(); ++s) {
            const auto& en = mdp.enabled(s);
            int k = static_cast<int>(en.size());
            int count = 0;
            for (int i = 0; i < k; ++i)
                if (subsets[s] & (1u << i)) ++count;
            for (int i = 0; i < k; ++i)
                if (subsets[s] & (1u << i)) st.next_move[s][0].push_back({en[i], Rat(1, count)});
            st.next_move[s][1] = in_mec_state[s] ? sigma_mid[mec_of_state[s]][s]
                                                 : Dist{{en.front(), Rat(1)}};
        }
        for (int a = 0; a < mdp.num_actions(); ++a)
            for (int t = 0; t < mdp.num_states(); ++t) {
                st.memory_update[a][t][0] = {{switch_at[t] ? 1 : 0, Rat(1)}};
                st.memory_update[a][t][1] = {{1, Rat(1)}};
            }
        st.initial_memory = {{switch_at[s0] ? 1 : 0, Rat(1)}};
        emit_points(st);
    };

    // Mixed-radix walk over the per-state subsets.
    std::vector<unsigned> limit(mdp.num_states());
    for (int s = 0; s < mdp.num_states(); ++s)
        limit[s] = (1u << mdp.enabled(s).size());
    std::vector<unsigned> current(mdp.num_states(), 1);
    while (true) {
        for (unsigned mask = 0; mask < (1u << mec_states.size()); ++mask)
            build_and_emit(current, mask);
        int i = 0;
        while (i < mdp.num_states() && ++current[i] == limit[i]) current[i++] = 1;
        if (i == mdp.num_states()) break;
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

}  // namespace mdpstab::oracles
