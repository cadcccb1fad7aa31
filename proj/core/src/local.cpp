#include "mdpstab/local.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

namespace mdpstab {

namespace {

/// Chain of a memoryless deterministic strategy with every state materialized
/// as a location, so per-state statistics come from one analysis.
MarkovChain md_chain_all_states(const Mdp& mdp, const MemorylessDeterministicStrategy& md) {
    MarkovChain chain;
    for (int s = 0; s < mdp.num_states(); ++s)
        chain.locations.push_back({s, 0, md.choice[s]});
    std::sort(chain.locations.begin(), chain.locations.end());
    chain.edges.assign(chain.locations.size(), {});
    chain.reward.resize(chain.locations.size());
    for (int i = 0; i < chain.num_locations(); ++i) {
        const auto& loc = chain.locations[i];
        chain.reward[i] = mdp.action(loc.action).reward;
        for (const auto& [t, p] : mdp.action(loc.action).transitions) {
            int j = chain.find({t, 0, md.choice[t]});
            chain.edges[i].push_back({j, p});
        }
    }
    chain.initial = {{0, Rat(1)}};
    return chain;
}

}  // namespace

std::vector<LongRunStats> md_local_stats(const Mdp& mdp,
                                         const MemorylessDeterministicStrategy& md) {
    MarkovChain chain = md_chain_all_states(mdp, md);
    ChainAnalysis analysis = analyze_chain(chain);
    std::vector<LongRunStats> stats(mdp.num_states());
    for (int s = 0; s < mdp.num_states(); ++s) {
        int loc = chain.find({s, 0, md.choice[s]});
        Rat mp = 0, lv = 0;
        for (std::size_t b = 0; b < analysis.components.size(); ++b) {
            mp += analysis.reach[b][loc] * analysis.mean[b];
            lv += analysis.reach[b][loc] * analysis.local_variance[b];
        }
        stats[s] = LongRunStats{mp, lv};
    }
    return stats;
}

unsigned long long count_md_strategies(const Mdp& mdp) {
    const auto cap = std::numeric_limits<unsigned long long>::max();
    unsigned long long total = 1;
    for (int s = 0; s < mdp.num_states(); ++s) {
        unsigned long long k = mdp.enabled(s).size();
        if (total > cap / k) return cap;
        total *= k;
    }
    return total;
}

MemorylessDeterministicStrategy md_strategy_at(const Mdp& mdp, unsigned long long index) {
    MemorylessDeterministicStrategy md;
    md.choice.resize(mdp.num_states());
    // Mixed radix, last state varying fastest.
    for (int s = mdp.num_states() - 1; s >= 0; --s) {
        unsigned long long k = mdp.enabled(s).size();
        md.choice[s] = mdp.enabled(s)[static_cast<std::size_t>(index % k)];
        index /= k;
    }
    return md;
}

ProductMdp build_product(const Mdp& mdp, const MemorylessDeterministicStrategy& pi,
                         const MemorylessDeterministicStrategy& pi2) {
    auto stats1 = md_local_stats(mdp, pi);
    auto stats2 = md_local_stats(mdp, pi2);
    const Rat penalty1 = mdp.max_reward() + 1;
    const Rat spread = mdp.max_reward() - mdp.min_reward();
    const Rat penalty2 = spread * spread + 1;

    RawMdp raw;
    raw.states.push_back("in");
    for (int s = 0; s < mdp.num_states(); ++s) {
        raw.states.push_back("m1:" + mdp.state_name(s));
        raw.states.push_back("m2:" + mdp.state_name(s));
        raw.states.push_back("m2x:" + mdp.state_name(s));
    }
    raw.initial = "in";

    struct PendingReward {
        std::string id;
        Rat r1, r2;
    };
    std::vector<PendingReward> rewards;
    auto add = [&](const std::string& id, const std::string& src,
                   std::vector<std::pair<std::string, Rat>> tr, const Rat& r1, const Rat& r2) {
        RawAction a;
        a.id = id;
        a.source = src;
        a.reward = r1;  // the embedded MDP carries the first reward dimension
        a.transitions = std::move(tr);
        raw.actions.push_back(std::move(a));
        rewards.push_back({id, r1, r2});
    };

    const std::string start = mdp.state_name(mdp.initial_state());
    add("d@in", "in", {{"m1:" + start, Rat(1)}}, penalty1, penalty2);
    add("c1@in", "in", {{"m2:" + start, Rat(1)}}, penalty1, penalty2);
    add("c2@in", "in", {{"m2x:" + start, Rat(1)}}, penalty1, penalty2);
    for (int s = 0; s < mdp.num_states(); ++s) {
        const std::string name = mdp.state_name(s);
        for (int a : mdp.enabled(s)) {
            std::vector<std::pair<std::string, Rat>> tr;
            for (const auto& [t, p] : mdp.action(a).transitions)
                tr.push_back({"m1:" + mdp.state_name(t), p});
            add(mdp.action(a).id + "@m1:" + name, "m1:" + name, std::move(tr), penalty1,
                penalty2);
        }
        add("c1@m1:" + name, "m1:" + name, {{"m2:" + name, Rat(1)}}, penalty1, penalty2);
        add("c2@m1:" + name, "m1:" + name, {{"m2x:" + name, Rat(1)}}, penalty1, penalty2);
        add("d@m2:" + name, "m2:" + name, {{"m2:" + name, Rat(1)}}, stats1[s].mean_payoff,
            stats1[s].local_variance);
        add("d@m2x:" + name, "m2x:" + name, {{"m2x:" + name, Rat(1)}}, stats2[s].mean_payoff,
            stats2[s].local_variance);
    }

    ProductMdp prod;
    prod.mdp = validate_mdp(raw);
    prod.s_in = prod.mdp.state_index("in");
    prod.r1.resize(prod.mdp.num_actions());
    prod.r2.resize(prod.mdp.num_actions());
    for (const auto& pr : rewards) {
        int idx = prod.mdp.action_index(pr.id);
        prod.r1[idx] = pr.r1;
        prod.r2[idx] = pr.r2;
    }
    prod.base_state.assign(prod.mdp.num_states(), -1);
    prod.layer.assign(prod.mdp.num_states(), 0);
    prod.m1_state.assign(mdp.num_states(), -1);
    prod.commit1_action.assign(mdp.num_states(), -1);
    prod.commit2_action.assign(mdp.num_states(), -1);
    prod.lifted_action.assign(mdp.num_actions(), -1);
    prod.default2_action.assign(mdp.num_states(), -1);
    prod.default3_action.assign(mdp.num_states(), -1);
    for (int s = 0; s < mdp.num_states(); ++s) {
        const std::string name = mdp.state_name(s);
        int w1 = prod.mdp.state_index("m1:" + name);
        int w2 = prod.mdp.state_index("m2:" + name);
        int w3 = prod.mdp.state_index("m2x:" + name);
        prod.base_state[w1] = prod.base_state[w2] = prod.base_state[w3] = s;
        prod.layer[w1] = 1;
        prod.layer[w2] = 2;
        prod.layer[w3] = 3;
        prod.m1_state[s] = w1;
        prod.commit1_action[s] = prod.mdp.action_index("c1@m1:" + name);
        prod.commit2_action[s] = prod.mdp.action_index("c2@m1:" + name);
        prod.default2_action[s] = prod.mdp.action_index("d@m2:" + name);
        prod.default3_action[s] = prod.mdp.action_index("d@m2x:" + name);
        for (int a : mdp.enabled(s))
            prod.lifted_action[a] = prod.mdp.action_index(mdp.action(a).id + "@m1:" + name);
    }
    return prod;
}

namespace {

struct ProductSolution {
    std::vector<Rat> y_state;   // per product state
    std::vector<Rat> y_action;  // per product action
};

/// Feasibility of the two-dimensional mean-payoff system on the product:
/// transient flow, normalization, per-MEC coupling, and the two reward rows.
/// Recurrent mass on the m1 layer is disallowed (committed strategies
/// suffice), which turns the coupling rows of m1-layer MECs into y = 0.
std::optional<ProductSolution> solve_product_system(const ProductMdp& prod, const Rat& u,
                                                    const Rat& v) {
    const Mdp& pm = prod.mdp;
    LinearProgram lp;
    std::vector<int> yw(pm.num_states()), ya(pm.num_actions());
    std::vector<int> xd(pm.num_actions(), -1);
    for (int w = 0; w < pm.num_states(); ++w) yw[w] = lp.add_variable("y_s" + std::to_string(w));
    for (int a = 0; a < pm.num_actions(); ++a) ya[a] = lp.add_variable("y_a" + std::to_string(a));
    for (int s = 0; s < static_cast<int>(prod.default2_action.size()); ++s) {
        xd[prod.default2_action[s]] = lp.add_variable("x2_" + std::to_string(s));
        xd[prod.default3_action[s]] = lp.add_variable("x3_" + std::to_string(s));
    }

    for (int t = 0; t < pm.num_states(); ++t) {
        std::vector<Rat> coeff(pm.num_actions(), 0);
        for (int a = 0; a < pm.num_actions(); ++a)
            for (const auto& [tt, p] : pm.action(a).transitions)
                if (tt == t) coeff[a] += p;
        for (int a : pm.enabled(t)) coeff[a] -= 1;
        std::vector<std::pair<int, Rat>> row;
        for (int a = 0; a < pm.num_actions(); ++a)
            if (coeff[a] != 0) row.push_back({ya[a], coeff[a]});
        row.push_back({yw[t], Rat(-1)});
        lp.add_row(std::move(row), Rel::Eq, t == prod.s_in ? Rat(-1) : Rat(0));
    }

    auto mecs = mec_decomposition(pm);
    {
        std::vector<std::pair<int, Rat>> row;
        for (const Mec& mec : mecs)
            for (int w : mec.states) row.push_back({yw[w], Rat(1)});
        lp.add_row(std::move(row), Rel::Eq, Rat(1));
    }
    for (const Mec& mec : mecs) {
        std::vector<std::pair<int, Rat>> row;
        for (int w : mec.states) row.push_back({yw[w], Rat(1)});
        for (int a : mec.actions)
            if (xd[a] >= 0) row.push_back({xd[a], Rat(-1)});
        lp.add_row(std::move(row), Rel::Eq, Rat(0));
    }

    std::vector<std::pair<int, Rat>> u_row, v_row;
    for (int a = 0; a < pm.num_actions(); ++a) {
        if (xd[a] < 0) continue;
        if (prod.r1[a] != 0) u_row.push_back({xd[a], prod.r1[a]});
        if (prod.r2[a] != 0) v_row.push_back({xd[a], prod.r2[a]});
    }
    lp.add_row(std::move(u_row), Rel::Le, u);
    lp.add_row(std::move(v_row), Rel::Le, v);

    auto out = solve_lp(lp);
    if (out.status != LpStatus::Feasible) return std::nullopt;
    ProductSolution sol;
    sol.y_state.resize(pm.num_states());
    sol.y_action.resize(pm.num_actions());
    for (int w = 0; w < pm.num_states(); ++w) sol.y_state[w] = out.assignment[yw[w]];
    for (int a = 0; a < pm.num_actions(); ++a) sol.y_action[a] = out.assignment[ya[a]];
    return sol;
}

StochasticUpdateStrategy synthesize_local_strategy(const Mdp& mdp, const ProductMdp& prod,
                                                   const MemorylessDeterministicStrategy& pi,
                                                   const MemorylessDeterministicStrategy& pi2,
                                                   const ProductSolution& sol,
                                                   LocalWitness& witness) {
    StochasticUpdateStrategy st;
    st.memory = {"m1", "m2", "m2x"};
    const int M = 3;
    st.next_move.assign(mdp.num_states(), std::vector<Dist>(M));
    st.memory_update.assign(
        mdp.num_actions(),
        std::vector<std::vector<Dist>>(mdp.num_states(), std::vector<Dist>(M)));

    witness.commit1.assign(mdp.num_states(), Rat(0));
    witness.commit2.assign(mdp.num_states(), Rat(0));

    for (int s = 0; s < mdp.num_states(); ++s) {
        Rat real = 0;
        Dist moves;
        for (int a : mdp.enabled(s)) {
            const Rat& f = sol.y_action[prod.lifted_action[a]];
            if (f > 0) moves.push_back({a, f});
            real += f;
        }
        const Rat& c1 = sol.y_action[prod.commit1_action[s]];
        const Rat& c2 = sol.y_action[prod.commit2_action[s]];
        Rat total = real + c1 + c2;
        if (total > 0) {
            witness.commit1[s] = c1 / total;
            witness.commit2[s] = c2 / total;
        }
        if (real > 0) {
            for (auto& [a, f] : moves) f /= real;
            st.next_move[s][0] = std::move(moves);
        } else {
            st.next_move[s][0] = {{mdp.enabled(s).front(), Rat(1)}};
        }
        st.next_move[s][1] = {{pi.choice[s], Rat(1)}};
        st.next_move[s][2] = {{pi2.choice[s], Rat(1)}};
    }

    for (int a = 0; a < mdp.num_actions(); ++a)
        for (int t = 0; t < mdp.num_states(); ++t) {
            Dist d;
            Rat stay = 1 - witness.commit1[t] - witness.commit2[t];
            if (stay > 0) d.push_back({0, stay});
            if (witness.commit1[t] > 0) d.push_back({1, witness.commit1[t]});
            if (witness.commit2[t] > 0) d.push_back({2, witness.commit2[t]});
            st.memory_update[a][t][0] = std::move(d);
            st.memory_update[a][t][1] = {{1, Rat(1)}};
            st.memory_update[a][t][2] = {{2, Rat(1)}};
        }

    // Initial commit lottery from the product start state.
    const Rat& a_d = sol.y_action[prod.mdp.action_index("d@in")];
    const Rat& a_1 = sol.y_action[prod.mdp.action_index("c1@in")];
    const Rat& a_2 = sol.y_action[prod.mdp.action_index("c2@in")];
    Rat total = a_d + a_1 + a_2;
    assert(total == 1);
    (void)total;
    st.initial_memory.clear();
    if (a_d > 0) st.initial_memory.push_back({0, a_d});
    if (a_1 > 0) st.initial_memory.push_back({1, a_1});
    if (a_2 > 0) st.initial_memory.push_back({2, a_2});
    witness.initial_commit = st.initial_memory;
    return st;
}

}  // namespace

LocalCheckResult check_local(const Mdp& mdp, int s0, const Rat& u, const Rat& v,
                             std::optional<unsigned long long> pair_budget) {
    const unsigned long long budget = pair_budget.value_or(10000ULL);
    const unsigned long long n_md = count_md_strategies(mdp);
    bool truncated = false;
    unsigned long long pairs = 0;

    // The product reduction fixes the start state through its s_in wiring;
    // rebase the MDP when the query starts elsewhere.
    const Mdp* base = &mdp;
    Mdp rebased;
    if (s0 != mdp.initial_state()) {
        RawMdp raw;
        for (int s = 0; s < mdp.num_states(); ++s) raw.states.push_back(mdp.state_name(s));
        raw.initial = mdp.state_name(s0);
        for (int a = 0; a < mdp.num_actions(); ++a) {
            const auto& act = mdp.action(a);
            RawAction ra{act.id, mdp.state_name(act.source), act.reward, {}};
            for (const auto& [t, p] : act.transitions)
                ra.transitions.push_back({mdp.state_name(t), p});
            raw.actions.push_back(std::move(ra));
        }
        rebased = validate_mdp(raw);
        base = &rebased;
    }

    for (unsigned long long i = 0; i < n_md; ++i) {
        auto pi = md_strategy_at(*base, i);
        for (unsigned long long j = 0; j < n_md; ++j) {
            if (pairs >= budget) {
                truncated = true;
                break;
            }
            ++pairs;
            auto pi2 = md_strategy_at(*base, j);
            ProductMdp prod = build_product(*base, pi, pi2);
            auto sol = solve_product_system(prod, u, v);
            if (!sol) continue;

            LocalCheckResult res;
            res.answer = LocalAnswer::Yes;
            LocalWitness w;
            w.pi = pi;
            w.pi2 = pi2;
            w.strategy = synthesize_local_strategy(*base, prod, pi, pi2, *sol, w);
            auto analysis = analyze_chain(induce_chain(*base, w.strategy, s0));
            w.mean = analysis.expected_mean_payoff;
            w.local_variance = analysis.expected_local_variance;
            res.witness = std::move(w);
            return res;
        }
        if (truncated) break;
    }
    LocalCheckResult res;
    res.answer = truncated ? LocalAnswer::BudgetExceeded : LocalAnswer::No;
    return res;
}

}  // namespace mdpstab
