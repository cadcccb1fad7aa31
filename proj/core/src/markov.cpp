#include "mdpstab/markov.hpp"

#include <algorithm>
#include <cassert>
#include <queue>
#include <set>
#include <stdexcept>

namespace mdpstab {

std::vector<Rat> solve_linear_system(std::vector<std::vector<Rat>> a, std::vector<Rat> b) {
    const int n = static_cast<int>(a.size());
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r)
            if (a[r][col] != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0) throw std::runtime_error("SingularSystem");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        Rat p = a[col][col];
        for (int j = col; j < n; ++j) a[col][j] /= p;
        b[col] /= p;
        for (int r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0) continue;
            Rat f = a[r][col];
            for (int j = col; j < n; ++j) a[r][j] -= f * a[col][j];
            b[r] -= f * b[col];
        }
    }
    return b;
}

PayoffInterval mec_payoff_bounds(const Mdp& mdp, const Mec& mec) {
    LinearProgram lp;
    std::vector<int> var_of_action(mdp.num_actions(), -1);
    for (int a : mec.actions) var_of_action[a] = lp.add_variable("x_" + mdp.action(a).id);

    // Flow balance per MEC state, and total frequency one.
    for (int s : mec.states) {
        std::vector<std::pair<int, Rat>> row;
        for (int a : mec.actions) {
            Rat c = 0;
            for (const auto& [t, p] : mdp.action(a).transitions)
                if (t == s) c += p;
            if (mdp.action(a).source == s) c -= 1;
            if (c != 0) row.push_back({var_of_action[a], c});
        }
        lp.add_row(std::move(row), Rel::Eq, Rat(0));
    }
    {
        std::vector<std::pair<int, Rat>> row;
        for (int a : mec.actions) row.push_back({var_of_action[a], Rat(1)});
        lp.add_row(std::move(row), Rel::Eq, Rat(1));
    }

    LinearProgram::Objective obj;
    for (int a : mec.actions) obj.coeffs.push_back({var_of_action[a], mdp.action(a).reward});

    lp.objective = obj;
    lp.objective->maximize = false;
    auto lo = solve_lp(lp);
    lp.objective->maximize = true;
    auto hi = solve_lp(lp);
    if (lo.status != LpStatus::Optimal || hi.status != LpStatus::Optimal)
        throw std::runtime_error("mec_payoff_bounds: flow polytope not solvable");
    return PayoffInterval{*lo.objective_value, *hi.objective_value};
}

std::vector<Rat> chain_reach_probabilities(const MarkovChain& chain,
                                           const std::vector<int>& target) {
    const int n = chain.num_locations();
    std::vector<char> is_target(n, 0);
    for (int t : target) is_target[t] = 1;

    // Locations with positive reach probability, via the target-absorbing
    // reformulation (targets count as absorbing).
    std::vector<std::vector<int>> pred(n);
    for (int i = 0; i < n; ++i)
        if (!is_target[i])
            for (const auto& [j, p] : chain.edges[i]) {
                pred[j].push_back(i);
                (void)p;
            }
    std::vector<char> positive(n, 0);
    std::queue<int> bfs;
    for (int t : target)
        if (!positive[t]) {
            positive[t] = 1;
            bfs.push(t);
        }
    while (!bfs.empty()) {
        int v = bfs.front();
        bfs.pop();
        for (int u : pred[v])
            if (!positive[u]) {
                positive[u] = 1;
                bfs.push(u);
            }
    }

    std::vector<int> unknown;  // positive, not target
    std::vector<int> sys_index(n, -1);
    for (int i = 0; i < n; ++i)
        if (positive[i] && !is_target[i]) {
            sys_index[i] = static_cast<int>(unknown.size());
            unknown.push_back(i);
        }

    std::vector<Rat> prob(n, 0);
    for (int t : target) prob[t] = 1;
    if (!unknown.empty()) {
        const int k = static_cast<int>(unknown.size());
        std::vector<std::vector<Rat>> a(k, std::vector<Rat>(k, 0));
        std::vector<Rat> b(k, 0);
        for (int r = 0; r < k; ++r) {
            a[r][r] = 1;
            for (const auto& [j, p] : chain.edges[unknown[r]]) {
                if (is_target[j])
                    b[r] += p;
                else if (sys_index[j] >= 0)
                    a[r][sys_index[j]] -= p;
                // edges into zero-probability locations contribute nothing
            }
        }
        auto sol = solve_linear_system(std::move(a), std::move(b));
        for (int r = 0; r < k; ++r) prob[unknown[r]] = sol[r];
    }
    return prob;
}

std::vector<Rat> bscc_stationary(const MarkovChain& chain, const Bscc& bscc) {
    const int k = static_cast<int>(bscc.locations.size());
    std::vector<int> pos(chain.num_locations(), -1);
    for (int i = 0; i < k; ++i) pos[bscc.locations[i]] = i;

    // pi P = pi with sum pi = 1; replace the last balance row by the
    // normalization to make the system square and regular.
    std::vector<std::vector<Rat>> a(k, std::vector<Rat>(k, 0));
    std::vector<Rat> b(k, 0);
    for (int i = 0; i < k; ++i) {
        a[i][i] = -1;
        for (const auto& [j, p] : chain.edges[bscc.locations[i]]) {
            assert(pos[j] >= 0);
            a[pos[j]][i] += p;
        }
    }
    for (int i = 0; i < k; ++i) a[k - 1][i] = 1;
    b[k - 1] = 1;
    return solve_linear_system(std::move(a), std::move(b));
}

ChainAnalysis analyze_chain(const MarkovChain& chain) {
    ChainAnalysis out;
    out.components = bsccs(chain);
    const int nb = static_cast<int>(out.components.size());
    out.stationary.resize(nb);
    out.mean.resize(nb);
    out.mean_sq_reward.resize(nb);
    out.local_variance.resize(nb);
    out.reach.resize(nb);
    out.trap_probability.assign(nb, Rat(0));

    for (int b = 0; b < nb; ++b) {
        const Bscc& comp = out.components[b];
        out.stationary[b] = bscc_stationary(chain, comp);
        Rat mean = 0, sq = 0;
        for (std::size_t i = 0; i < comp.locations.size(); ++i) {
            const Rat& r = chain.reward[comp.locations[i]];
            mean += out.stationary[b][i] * r;
            sq += out.stationary[b][i] * r * r;
        }
        out.mean[b] = mean;
        out.mean_sq_reward[b] = sq;
        out.local_variance[b] = sq - mean * mean;
        out.reach[b] = chain_reach_probabilities(chain, comp.locations);
        for (const auto& [loc, p] : chain.initial) out.trap_probability[b] += p * out.reach[b][loc];
    }

    out.expected_mean_payoff = 0;
    out.expected_local_variance = 0;
    out.expected_mean_payoff_r2 = 0;
    Rat second_moment = 0;
    for (int b = 0; b < nb; ++b) {
        out.expected_mean_payoff += out.trap_probability[b] * out.mean[b];
        second_moment += out.trap_probability[b] * out.mean[b] * out.mean[b];
        out.expected_local_variance += out.trap_probability[b] * out.local_variance[b];
        out.expected_mean_payoff_r2 += out.trap_probability[b] * out.mean_sq_reward[b];
    }
    out.variance_of_mean_payoff =
        second_moment - out.expected_mean_payoff * out.expected_mean_payoff;
    out.expected_hybrid_variance =
        out.expected_mean_payoff_r2 - out.expected_mean_payoff * out.expected_mean_payoff;
    return out;
}

LongRunStats chain_long_run_stats(const MarkovChain& chain, int from) {
    MarkovChain copy = chain;
    copy.initial = {{from, Rat(1)}};
    auto analysis = analyze_chain(copy);
    return LongRunStats{analysis.expected_mean_payoff, analysis.expected_local_variance};
}

CumulativeRewardResult min_cumulative_reward_as_reach(const Mdp& mdp,
                                                      const std::vector<int>& target) {
    auto reach = almost_sure_reach(mdp, target);
    std::set<int> winning(reach.winning.begin(), reach.winning.end());
    std::set<int> target_set(target.begin(), target.end());

    // Sub-MDP induced by the winning region: only actions staying inside.
    auto stays = [&](int a) {
        for (const auto& [t, p] : mdp.action(a).transitions) {
            if (!winning.count(t)) return false;
            (void)p;
        }
        return true;
    };

    // Largest subsolution of the Bellman inequalities equals the minimal
    // expected total reward among almost-surely reaching policies.
    LinearProgram lp;
    std::vector<int> var(mdp.num_states(), -1);
    for (int s : reach.winning)
        if (!target_set.count(s)) var[s] = lp.add_variable("v_" + mdp.state_name(s), false);
    LinearProgram::Objective obj;
    obj.maximize = true;
    for (int s : reach.winning)
        if (var[s] >= 0) obj.coeffs.push_back({var[s], Rat(1)});

    for (int s : reach.winning) {
        if (target_set.count(s)) continue;
        for (int a : mdp.enabled(s)) {
            if (!stays(a)) continue;
            std::vector<std::pair<int, Rat>> row{{var[s], Rat(1)}};
            Rat rhs = mdp.action(a).reward;
            for (const auto& [t, p] : mdp.action(a).transitions)
                if (var[t] >= 0) row.push_back({var[t], -p});
            lp.add_row(std::move(row), Rel::Le, rhs);
        }
    }

    CumulativeRewardResult res;
    res.winning = reach.winning;
    res.value.assign(mdp.num_states(), Rat(0));
    res.witness.choice.assign(mdp.num_states(), -1);
    if (res.winning.empty()) {
        for (int s = 0; s < mdp.num_states(); ++s) res.witness.choice[s] = mdp.enabled(s).front();
        return res;
    }

    if (!obj.coeffs.empty()) {
        lp.objective = obj;
        auto sol = solve_lp(lp);
        if (sol.status != LpStatus::Optimal)
            throw std::runtime_error("min_cumulative_reward: LP not optimal");
        for (int s : reach.winning)
            if (var[s] >= 0) res.value[s] = sol.assignment[var[s]];
    }

    // Witness: restrict to value-tight actions, then force almost-sure
    // reachability inside that sub-MDP (avoids dawdling on zero cycles).
    std::vector<char> optimal_action(mdp.num_actions(), 0);
    for (int s : reach.winning) {
        if (target_set.count(s)) continue;
        for (int a : mdp.enabled(s)) {
            if (!stays(a)) continue;
            Rat q = mdp.action(a).reward;
            for (const auto& [t, p] : mdp.action(a).transitions) q += p * res.value[t];
            if (q == res.value[s]) optimal_action[a] = 1;
        }
    }
    // Build the argmin sub-MDP as a raw model and reuse the attractor.
    {
        RawMdp raw;
        std::vector<int> keep;
        for (int s : reach.winning) keep.push_back(s);
        for (int s : keep) raw.states.push_back(mdp.state_name(s));
        raw.initial = raw.states.front();
        std::vector<std::string> sub_target;
        for (int s : keep) {
            if (target_set.count(s)) {
                RawAction loop;
                loop.id = "__stay_" + mdp.state_name(s);
                loop.source = mdp.state_name(s);
                loop.reward = 0;
                loop.transitions = {{mdp.state_name(s), Rat(1)}};
                raw.actions.push_back(loop);
                sub_target.push_back(mdp.state_name(s));
                continue;
            }
            for (int a : mdp.enabled(s)) {
                if (!optimal_action[a]) continue;
                RawAction ra;
                ra.id = mdp.action(a).id;
                ra.source = mdp.state_name(s);
                ra.reward = mdp.action(a).reward;
                for (const auto& [t, p] : mdp.action(a).transitions)
                    ra.transitions.push_back({mdp.state_name(t), p});
                raw.actions.push_back(std::move(ra));
            }
        }
        Mdp sub = validate_mdp(raw);
        std::vector<int> tgt;
        for (const auto& name : sub_target) tgt.push_back(sub.state_index(name));
        auto sub_reach = almost_sure_reach(sub, tgt);
        if (sub_reach.winning.size() != static_cast<std::size_t>(sub.num_states()))
            throw std::runtime_error("min_cumulative_reward: optimal region not closed");
        for (int s : keep) {
            if (target_set.count(s)) continue;
            int sub_s = sub.state_index(mdp.state_name(s));
            res.witness.choice[s] = mdp.action_index(sub.action(sub_reach.witness.choice[sub_s]).id);
        }
    }
    for (int s = 0; s < mdp.num_states(); ++s)
        if (res.witness.choice[s] < 0) res.witness.choice[s] = mdp.enabled(s).front();
    return res;
}

}  // namespace mdpstab
