#include "mdpstab/hybrid.hpp"

#include "mdpstab/sim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <set>

namespace mdpstab {

HybridSystem build_system_LH(const Mdp& mdp, int s0) {
    HybridSystem sys;
    sys.s0 = s0;
    sys.mecs = mec_decomposition(mdp);

    sys.y_state_var.resize(mdp.num_states());
    sys.y_action_var.resize(mdp.num_actions());
    sys.x_action_var.resize(mdp.num_actions());
    for (int s = 0; s < mdp.num_states(); ++s)
        sys.y_state_var[s] = sys.base.add_variable("y_" + mdp.state_name(s));
    for (int a = 0; a < mdp.num_actions(); ++a)
        sys.y_action_var[a] = sys.base.add_variable("y_" + mdp.action(a).id);
    for (int a = 0; a < mdp.num_actions(); ++a)
        sys.x_action_var[a] = sys.base.add_variable("x_" + mdp.action(a).id);

    // (8) transient flow for y.
    for (int t = 0; t < mdp.num_states(); ++t) {
        std::vector<Rat> coeff(mdp.num_actions(), 0);
        for (int a = 0; a < mdp.num_actions(); ++a)
            for (const auto& [tt, p] : mdp.action(a).transitions)
                if (tt == t) coeff[a] += p;
        for (int a : mdp.enabled(t)) coeff[a] -= 1;
        std::vector<std::pair<int, Rat>> row;
        for (int a = 0; a < mdp.num_actions(); ++a)
            if (coeff[a] != 0) row.push_back({sys.y_action_var[a], coeff[a]});
        row.push_back({sys.y_state_var[t], Rat(-1)});
        sys.base.add_row(std::move(row), Rel::Eq, t == s0 ? Rat(-1) : Rat(0));
    }
    // (9) normalization over MEC states.
    {
        std::vector<std::pair<int, Rat>> row;
        for (const Mec& mec : sys.mecs)
            for (int s : mec.states) row.push_back({sys.y_state_var[s], Rat(1)});
        sys.base.add_row(std::move(row), Rel::Eq, Rat(1));
    }
    // (10) per-MEC coupling of trapped y mass and recurrent x mass.
    for (const Mec& mec : sys.mecs) {
        std::vector<std::pair<int, Rat>> row;
        for (int s : mec.states) row.push_back({sys.y_state_var[s], Rat(1)});
        for (int a : mec.actions) row.push_back({sys.x_action_var[a], Rat(-1)});
        sys.base.add_row(std::move(row), Rel::Eq, Rat(0));
    }
    // (11) recurrent flow balance for x.
    for (int t = 0; t < mdp.num_states(); ++t) {
        std::vector<Rat> coeff(mdp.num_actions(), 0);
        for (int a = 0; a < mdp.num_actions(); ++a)
            for (const auto& [tt, p] : mdp.action(a).transitions)
                if (tt == t) coeff[a] += p;
        for (int a : mdp.enabled(t)) coeff[a] -= 1;
        std::vector<std::pair<int, Rat>> row;
        for (int a = 0; a < mdp.num_actions(); ++a)
            if (coeff[a] != 0) row.push_back({sys.x_action_var[a], coeff[a]});
        sys.base.add_row(std::move(row), Rel::Eq, Rat(0));
    }

    for (int a = 0; a < mdp.num_actions(); ++a) {
        const Rat& r = mdp.action(a).reward;
        if (r != 0) {
            sys.mean_coeffs.push_back({sys.x_action_var[a], r});
            sys.sq_coeffs.push_back({sys.x_action_var[a], r * r});
        }
    }
    return sys;
}

HybridCheckResult approx_check_hybrid(const Mdp& mdp, int s0, const Rat& u, const Rat& v,
                                      const Rat& eps) {
    if (eps <= 0) throw ModelError("InvalidEps", format_rational(eps));
    HybridSystem sys = build_system_LH(mdp, s0);

    const Rat r_lo = mdp.min_reward();
    const Rat r_hi = mdp.max_reward();
    const Rat n_abs = mdp.max_abs_reward();
    const Rat tau = eps / (8 * rat_max(n_abs, Rat(1)));
    const Rat slack = 2 * rat_abs(r_hi) * tau;

    std::vector<Rat> grid;
    grid.push_back(r_lo);
    grid.push_back(r_hi);
    Rat mu0 = floor_to_multiple(r_lo, tau);
    if (mu0 < r_lo) mu0 += tau;
    for (Rat mu = mu0; mu <= r_hi; mu += tau) grid.push_back(mu);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    for (const Rat& mu : grid) {
        Rat upper = rat_min(mu + tau, u);
        if (upper < mu - tau) continue;
        LinearProgram lp = sys.base;
        lp.add_row(sys.mean_coeffs, Rel::Ge, mu - tau);
        lp.add_row(sys.mean_coeffs, Rel::Le, upper);
        lp.add_row(sys.sq_coeffs, Rel::Le, v + slack + mu * mu);
        auto out = solve_lp(lp);
        if (out.status != LpStatus::Feasible) continue;

        HybridCheckResult res;
        res.yes = true;
        HybridWitness w;
        w.assignment = out.assignment;
        w.mu = mu;
        w.strategy = synthesize_hybrid(mdp, sys, w.assignment);
        {
            auto analysis = analyze_chain(induce_chain(mdp, w.strategy, s0));
            w.mean = analysis.expected_mean_payoff;
            w.hybrid_variance = analysis.expected_hybrid_variance;
        }
        res.witness = std::move(w);
        return res;
    }
    return HybridCheckResult{};
}

namespace {

/// End components of a MEC's positive-x action support, as (states, actions)
/// of the parent MDP.
std::vector<Mec> support_components(const Mdp& mdp, const Mec& mec,
                                    const std::vector<Rat>& x_of_action) {
    std::vector<char> allowed(mdp.num_actions(), 0);
    for (int a : mec.actions)
        if (x_of_action[a] > 0) allowed[a] = 1;
    return mec_decomposition_restricted(mdp, allowed);
}

}  // namespace

StochasticUpdateStrategy synthesize_hybrid(const Mdp& mdp, const HybridSystem& sys,
                                           std::vector<Rat>& assignment) {
    auto x_of = [&](int a) { return assignment[sys.x_action_var[a]]; };

    // When the x support inside a MEC splits into several end components, the
    // switch mass must land on each component in proportion to its x mass.
    // Re-solve with per-component coupling rows, keeping x fixed; such a
    // routing always exists inside a strongly connected MEC.
    bool needs_repair = false;
    std::vector<std::vector<Mec>> comps_per_mec(sys.mecs.size());
    {
        std::vector<Rat> xvals(mdp.num_actions());
        for (int a = 0; a < mdp.num_actions(); ++a) xvals[a] = x_of(a);
        for (std::size_t c = 0; c < sys.mecs.size(); ++c) {
            comps_per_mec[c] = support_components(mdp, sys.mecs[c], xvals);
            if (comps_per_mec[c].size() > 1) needs_repair = true;
        }
    }
    if (needs_repair) {
        LinearProgram lp = sys.base;
        for (int a = 0; a < mdp.num_actions(); ++a)
            lp.add_row({{sys.x_action_var[a], Rat(1)}}, Rel::Eq, x_of(a));
        for (std::size_t c = 0; c < sys.mecs.size(); ++c) {
            if (comps_per_mec[c].size() <= 1) continue;
            for (const Mec& comp : comps_per_mec[c]) {
                Rat mass = 0;
                for (int a : comp.actions) mass += x_of(a);
                std::vector<std::pair<int, Rat>> row;
                for (int s : comp.states) row.push_back({sys.y_state_var[s], Rat(1)});
                lp.add_row(std::move(row), Rel::Eq, mass);
            }
            // No switch mass outside the support components.
            std::set<int> covered;
            for (const Mec& comp : comps_per_mec[c])
                covered.insert(comp.states.begin(), comp.states.end());
            for (int s : sys.mecs[c].states)
                if (!covered.count(s))
                    lp.add_row({{sys.y_state_var[s], Rat(1)}}, Rel::Eq, Rat(0));
        }
        auto out = solve_lp(lp);
        if (out.status != LpStatus::Feasible)
            throw ModelError("InfeasibleSolution", "component-coupled repair failed");
        assignment = out.assignment;
    }

    StochasticUpdateStrategy st;
    st.memory = {"m1", "m2"};
    st.next_move.assign(mdp.num_states(), std::vector<Dist>(2));
    st.memory_update.assign(
        mdp.num_actions(),
        std::vector<std::vector<Dist>>(mdp.num_states(), std::vector<Dist>(2)));

    auto y_state = [&](int s) { return assignment[sys.y_state_var[s]]; };
    auto y_action = [&](int a) { return assignment[sys.y_action_var[a]]; };

    std::vector<Rat> switch_prob(mdp.num_states(), 0);
    for (int s = 0; s < mdp.num_states(); ++s) {
        Rat denom = y_state(s);
        for (int a : mdp.enabled(s)) denom += y_action(a);
        if (denom > 0 && y_state(s) > 0) switch_prob[s] = y_state(s) / denom;
    }

    for (int s = 0; s < mdp.num_states(); ++s) {
        Rat denom = 0;
        for (int a : mdp.enabled(s)) denom += y_action(a);
        if (denom > 0) {
            for (int a : mdp.enabled(s))
                if (y_action(a) > 0) st.next_move[s][0].push_back({a, y_action(a) / denom});
        } else {
            st.next_move[s][0] = {{mdp.enabled(s).front(), Rat(1)}};
        }
    }

    // m2: inside each MEC play the positive-x actions proportionally; states
    // of the MEC outside the support walk into it almost surely.
    for (int s = 0; s < mdp.num_states(); ++s)
        st.next_move[s][1] = {{mdp.enabled(s).front(), Rat(1)}};
    for (std::size_t c = 0; c < sys.mecs.size(); ++c) {
        const Mec& mec = sys.mecs[c];
        Rat mass = 0;
        for (int a : mec.actions) mass += x_of(a);
        if (mass == 0) continue;

        std::vector<int> supp_states;
        for (int s : mec.states) {
            Rat denom = 0;
            for (int a : mdp.enabled(s))
                if (std::find(mec.actions.begin(), mec.actions.end(), a) != mec.actions.end())
                    denom += x_of(a);
            if (denom > 0) {
                Dist d;
                for (int a : mdp.enabled(s))
                    if (x_of(a) > 0 &&
                        std::find(mec.actions.begin(), mec.actions.end(), a) != mec.actions.end())
                        d.push_back({a, x_of(a) / denom});
                st.next_move[s][1] = std::move(d);
                supp_states.push_back(s);
            }
        }
        // Remaining MEC states reach the support inside the restricted MDP.
        auto restriction = restrict_to_mec(mdp, mec);
        std::vector<int> local_supp;
        for (int s : supp_states)
            local_supp.push_back(restriction.mdp.state_index(mdp.state_name(s)));
        std::sort(local_supp.begin(), local_supp.end());
        auto reach = almost_sure_reach(restriction.mdp, local_supp);
        for (int ls = 0; ls < restriction.mdp.num_states(); ++ls) {
            int s = restriction.state_to_parent[ls];
            if (std::find(supp_states.begin(), supp_states.end(), s) != supp_states.end())
                continue;
            st.next_move[s][1] = {
                {restriction.action_to_parent[reach.witness.choice[ls]], Rat(1)}};
        }
    }

    for (int a = 0; a < mdp.num_actions(); ++a)
        for (int t = 0; t < mdp.num_states(); ++t) {
            if (switch_prob[t] == 0)
                st.memory_update[a][t][0] = {{0, Rat(1)}};
            else if (switch_prob[t] == 1)
                st.memory_update[a][t][0] = {{1, Rat(1)}};
            else
                st.memory_update[a][t][0] = {{0, 1 - switch_prob[t]}, {1, switch_prob[t]}};
            st.memory_update[a][t][1] = {{1, Rat(1)}};
        }

    if (switch_prob[sys.s0] == 0)
        st.initial_memory = {{0, Rat(1)}};
    else if (switch_prob[sys.s0] == 1)
        st.initial_memory = {{1, Rat(1)}};
    else
        st.initial_memory = {{0, 1 - switch_prob[sys.s0]}, {1, switch_prob[sys.s0]}};
    return st;
}

RelationReport check_relation(const Mdp& mdp, const StochasticUpdateStrategy& strategy, int s0,
                              const SimConfig& cfg) {
    RelationReport rep{};
    auto analysis = analyze_chain(induce_chain(mdp, strategy, s0));
    rep.exact_hybrid = analysis.expected_hybrid_variance;
    rep.exact_var_mp = analysis.variance_of_mean_payoff;
    rep.exact_local = analysis.expected_local_variance;
    rep.exact_equal = rep.exact_hybrid == rep.exact_var_mp + rep.exact_local;

    auto stats = simulate(mdp, strategy, s0, cfg);
    rep.mc_hybrid = stats.expected_hybrid_variance;
    rep.mc_var_mp = stats.variance_of_mean_payoff;
    rep.mc_local = stats.expected_local_variance;
    rep.mc_se_hybrid = stats.se_hybrid_variance;
    rep.mc_se_var_mp = stats.se_variance;
    rep.mc_se_local = stats.se_local_variance;
    double combined = rep.mc_se_hybrid + rep.mc_se_var_mp + rep.mc_se_local;
    rep.mc_agree =
        std::abs(rep.mc_hybrid - (rep.mc_var_mp + rep.mc_local)) <= 3 * combined + 1e-9;
    return rep;
}

}  // namespace mdpstab
