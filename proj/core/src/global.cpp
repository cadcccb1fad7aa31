#include "mdpstab/global.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <stdexcept>

namespace mdpstab {

namespace {

/// Action frequencies of the uniformly randomizing memoryless strategy on a
/// strongly connected MDP; positive on every action.
std::vector<Rat> uniform_frequencies(const Mdp& mdp) {
    std::vector<Dist> uniform(mdp.num_states());
    for (int s = 0; s < mdp.num_states(); ++s) {
        Rat p(1, static_cast<int>(mdp.enabled(s).size()));
        for (int a : mdp.enabled(s)) uniform[s].push_back({a, p});
    }
    auto chain = induce_chain(mdp, lift_randomized(mdp, uniform), mdp.initial_state());
    auto comps = bsccs(chain);
    if (comps.size() != 1 || comps[0].locations.size() != static_cast<std::size_t>(chain.num_locations()))
        throw std::runtime_error("sigma_zc: MEC restriction is not strongly connected");
    auto pi = bscc_stationary(chain, comps[0]);
    std::vector<Rat> freq(mdp.num_actions(), 0);
    for (std::size_t i = 0; i < comps[0].locations.size(); ++i)
        freq[chain.locations[comps[0].locations[i]].action] += pi[i];
    return freq;
}

struct FrequencyVertex {
    Rat value;
    std::vector<Rat> freq;  // per action
};

FrequencyVertex extremal_frequencies(const Mdp& mdp, bool maximize) {
    LinearProgram lp;
    for (int a = 0; a < mdp.num_actions(); ++a) lp.add_variable("x_" + mdp.action(a).id);
    for (int s = 0; s < mdp.num_states(); ++s) {
        std::vector<std::pair<int, Rat>> row;
        for (int a = 0; a < mdp.num_actions(); ++a) {
            Rat c = 0;
            for (const auto& [t, p] : mdp.action(a).transitions)
                if (t == s) c += p;
            if (mdp.action(a).source == s) c -= 1;
            if (c != 0) row.push_back({a, c});
        }
        lp.add_row(std::move(row), Rel::Eq, Rat(0));
    }
    {
        std::vector<std::pair<int, Rat>> row;
        for (int a = 0; a < mdp.num_actions(); ++a) row.push_back({a, Rat(1)});
        lp.add_row(std::move(row), Rel::Eq, Rat(1));
    }
    LinearProgram::Objective obj;
    obj.maximize = maximize;
    for (int a = 0; a < mdp.num_actions(); ++a) obj.coeffs.push_back({a, mdp.action(a).reward});
    lp.objective = obj;
    auto out = solve_lp(lp);
    if (out.status != LpStatus::Optimal)
        throw std::runtime_error("sigma_zc: frequency polytope not solvable");
    return FrequencyVertex{*out.objective_value, out.assignment};
}

MecStrategy realize_frequencies(const Mdp& mdp, const std::vector<Rat>& freq) {
    MecStrategy strat;
    strat.per_state.assign(mdp.num_states(), {});
    std::vector<int> supp_states;
    for (int s = 0; s < mdp.num_states(); ++s) {
        Rat denom = 0;
        for (int a : mdp.enabled(s)) denom += freq[a];
        if (denom > 0) {
            for (int a : mdp.enabled(s))
                if (freq[a] > 0) strat.per_state[s].push_back({a, freq[a] / denom});
            supp_states.push_back(s);
        }
    }
    if (supp_states.size() < static_cast<std::size_t>(mdp.num_states())) {
        // Zero-frequency states walk into the support almost surely.
        auto reach = almost_sure_reach(mdp, supp_states);
        if (reach.winning.size() != static_cast<std::size_t>(mdp.num_states()))
            throw std::runtime_error("sigma_zc: support not almost surely reachable");
        for (int s = 0; s < mdp.num_states(); ++s)
            if (strat.per_state[s].empty())
                strat.per_state[s] = {{reach.witness.choice[s], Rat(1)}};
    }
    return strat;
}

}  // namespace

MecStrategy sigma_zc(const Mdp& mec_mdp, const Rat& z) {
    auto lo = extremal_frequencies(mec_mdp, false);
    auto hi = extremal_frequencies(mec_mdp, true);
    if (z < lo.value || z > hi.value) throw ModelError("ZOutsideInterval", format_rational(z));

    auto uniform = uniform_frequencies(mec_mdp);
    Rat w = 0;
    for (int a = 0; a < mec_mdp.num_actions(); ++a) w += uniform[a] * mec_mdp.action(a).reward;

    std::vector<Rat> mix(mec_mdp.num_actions());
    if (z == w) {
        mix = uniform;
    } else {
        const FrequencyVertex& ext = z > w ? hi : lo;
        // z = p*w + (1-p)*ext.value with p in [0,1).
        Rat p = (ext.value - z) / (ext.value - w);
        for (int a = 0; a < mec_mdp.num_actions(); ++a)
            mix[a] = p * uniform[a] + (1 - p) * ext.freq[a];
    }
    return realize_frequencies(mec_mdp, mix);
}

GlobalSystem build_global_base(const Mdp& mdp, int s0) {
    GlobalSystem sys;
    sys.s0 = s0;
    sys.mecs = mec_decomposition(mdp);
    for (const Mec& mec : sys.mecs) sys.bounds.push_back(mec_payoff_bounds(mdp, mec));

    sys.y_state_var.resize(mdp.num_states());
    sys.y_action_var.resize(mdp.num_actions());
    for (int s = 0; s < mdp.num_states(); ++s)
        sys.y_state_var[s] = sys.base.add_variable("y_" + mdp.state_name(s));
    for (int a = 0; a < mdp.num_actions(); ++a)
        sys.y_action_var[a] = sys.base.add_variable("y_" + mdp.action(a).id);

    // Flow: 1_{s0}(t) + sum_a y_a delta(a)(t) = sum_{Act(t)} y_a + y_t.
    for (int t = 0; t < mdp.num_states(); ++t) {
        std::vector<std::pair<int, Rat>> row;
        std::vector<Rat> coeff(mdp.num_actions(), 0);
        for (int a = 0; a < mdp.num_actions(); ++a)
            for (const auto& [tt, p] : mdp.action(a).transitions)
                if (tt == t) coeff[a] += p;
        for (int a : mdp.enabled(t)) coeff[a] -= 1;
        for (int a = 0; a < mdp.num_actions(); ++a)
            if (coeff[a] != 0) row.push_back({sys.y_action_var[a], coeff[a]});
        row.push_back({sys.y_state_var[t], Rat(-1)});
        sys.base.add_row(std::move(row), Rel::Eq, t == s0 ? Rat(-1) : Rat(0));
    }
    // Normalization over MEC states; y_t vanishes elsewhere as a consequence.
    {
        std::vector<std::pair<int, Rat>> row;
        for (const Mec& mec : sys.mecs)
            for (int s : mec.states) row.push_back({sys.y_state_var[s], Rat(1)});
        sys.base.add_row(std::move(row), Rel::Eq, Rat(1));
    }
    for (const Mec& mec : sys.mecs) {
        std::vector<std::pair<int, Rat>> mass;
        for (int s : mec.states) mass.push_back({sys.y_state_var[s], Rat(1)});
        sys.mec_mass.push_back(std::move(mass));
    }
    return sys;
}

std::vector<Rat> clamp_xc(const std::vector<PayoffInterval>& bounds, const Rat& z) {
    std::vector<Rat> x;
    x.reserve(bounds.size());
    for (const auto& b : bounds) x.push_back(clamp(z, b.alpha, b.beta));
    return x;
}

LinearProgram build_system_Lz(const Mdp& mdp, int s0, const Rat& u, const Rat& v, const Rat& z) {
    (void)v;  // the variance bound is enforced by the checker's sweep
    GlobalSystem sys = build_global_base(mdp, s0);
    auto x = clamp_xc(sys.bounds, z);
    LinearProgram lp = sys.base;
    std::vector<std::pair<int, Rat>> exp_row;
    for (std::size_t c = 0; c < sys.mecs.size(); ++c)
        for (const auto& [var, coeff] : sys.mec_mass[c]) exp_row.push_back({var, coeff * x[c]});
    lp.add_row(std::move(exp_row), Rel::Le, u);
    return lp;
}

Envelope lower_envelope(const LinearProgram& base,
                        const std::vector<std::pair<int, Rat>>& mean_coeffs,
                        const std::vector<std::pair<int, Rat>>& sq_coeffs) {
    auto value_of = [](const std::vector<std::pair<int, Rat>>& coeffs,
                       const std::vector<Rat>& x) {
        Rat v = 0;
        for (const auto& [var, c] : coeffs) v += c * x[var];
        return v;
    };

    // Lexicographic corner: extremal mean first, then minimal sq at that mean.
    auto corner = [&](bool maximize) -> std::optional<Envelope::Point> {
        LinearProgram lp = base;
        lp.objective = LinearProgram::Objective{maximize, mean_coeffs};
        auto out = solve_lp(lp);
        if (out.status != LpStatus::Optimal) return std::nullopt;
        Rat m = *out.objective_value;
        lp.add_row(mean_coeffs, Rel::Eq, m);
        lp.objective = LinearProgram::Objective{false, sq_coeffs};
        auto out2 = solve_lp(lp);
        assert(out2.status == LpStatus::Optimal);
        return Envelope::Point{m, *out2.objective_value, out2.assignment};
    };

    Envelope env;
    auto left = corner(false);
    if (!left) return env;  // infeasible polytope
    auto right = corner(true);
    assert(right);

    if (left->m == right->m) {
        env.points.push_back(*left);
        return env;
    }

    // Recursive refinement: find a supported point strictly below each chord.
    env.points.push_back(*left);
    std::vector<std::pair<Envelope::Point, Envelope::Point>> stack{{*left, *right}};
    int guard = 0;
    std::vector<Envelope::Point> interior;
    while (!stack.empty()) {
        if (++guard > 4096) throw std::runtime_error("lower_envelope: refinement diverged");
        auto [p1, p2] = stack.back();
        stack.pop_back();
        Rat lambda = (p2.g - p1.g) / (p2.m - p1.m);
        LinearProgram lp = base;
        LinearProgram::Objective obj;
        obj.maximize = false;
        std::map<int, Rat> combined;
        for (const auto& [var, c] : sq_coeffs) combined[var] += c;
        for (const auto& [var, c] : mean_coeffs) combined[var] -= lambda * c;
        obj.coeffs.assign(combined.begin(), combined.end());
        lp.objective = obj;
        auto out = solve_lp(lp);
        assert(out.status == LpStatus::Optimal);
        if (*out.objective_value < p1.g - lambda * p1.m) {
            Envelope::Point mid{value_of(mean_coeffs, out.assignment),
                                value_of(sq_coeffs, out.assignment), out.assignment};
            assert(mid.m > p1.m && mid.m < p2.m);
            interior.push_back(mid);
            stack.push_back({p1, mid});
            stack.push_back({mid, p2});
        }
    }
    for (auto& p : interior) env.points.push_back(std::move(p));
    env.points.push_back(*right);
    std::sort(env.points.begin(), env.points.end(),
              [](const Envelope::Point& a, const Envelope::Point& b) { return a.m < b.m; });
    return env;
}

namespace {

/// Interpolated envelope value and assignment at a given mean.
Envelope::Point envelope_at(const Envelope& env, const Rat& m) {
    const auto& pts = env.points;
    assert(!pts.empty() && m >= pts.front().m && m <= pts.back().m);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (m < pts[i].m || m > pts[i + 1].m) continue;
        if (pts[i + 1].m == pts[i].m) return pts[i];
        Rat t = (m - pts[i].m) / (pts[i + 1].m - pts[i].m);
        Envelope::Point p;
        p.m = m;
        p.g = pts[i].g + t * (pts[i + 1].g - pts[i].g);
        p.assignment.resize(pts[i].assignment.size());
        for (std::size_t k = 0; k < p.assignment.size(); ++k)
            p.assignment[k] = pts[i].assignment[k] +
                              t * (pts[i + 1].assignment[k] - pts[i].assignment[k]);
        return p;
    }
    return pts.back();
}

/// Exact feasibility of: exists m <= u in the envelope range with
/// g(m) - m^2 <= v. With g convex piecewise-linear, g(m) - m^2 is concave on
/// every piece, so only piece endpoints (clipped at u) can be minimal.
std::optional<Envelope::Point> envelope_feasible(const Envelope& env, const Rat& u,
                                                 const Rat& v) {
    if (env.empty() || u < env.points.front().m) return std::nullopt;
    std::vector<Rat> candidates;
    for (const auto& p : env.points)
        if (p.m <= u) candidates.push_back(p.m);
    if (u < env.points.back().m) candidates.push_back(u);
    for (const Rat& m : candidates) {  // ascending; smallest feasible mean wins
        Envelope::Point p = envelope_at(env, m);
        if (p.g - p.m * p.m <= v) return p;
    }
    return std::nullopt;
}

}  // namespace

GlobalChecker::GlobalChecker(const Mdp& mdp, int s0)
    : mdp_(mdp), s0_(s0), sys_(build_global_base(mdp, s0)) {}

const Envelope& GlobalChecker::envelope_for(const std::vector<Rat>& x) {
    auto it = envelopes_.find(x);
    if (it != envelopes_.end()) return it->second;
    std::vector<std::pair<int, Rat>> mean_coeffs, sq_coeffs;
    for (std::size_t c = 0; c < sys_.mecs.size(); ++c) {
        if (x[c] == 0) continue;
        for (const auto& [var, coeff] : sys_.mec_mass[c]) {
            mean_coeffs.push_back({var, coeff * x[c]});
            sq_coeffs.push_back({var, coeff * x[c] * x[c]});
        }
    }
    return envelopes_.emplace(x, lower_envelope(sys_.base, mean_coeffs, sq_coeffs))
        .first->second;
}

GlobalCheckResult GlobalChecker::check(const Rat& u, const Rat& v, const Rat& eps,
                                       bool build_witness) {
    if (eps <= 0) throw ModelError("InvalidEps", format_rational(eps));

    const Rat r_lo = mdp_.min_reward();
    const Rat r_hi = mdp_.max_reward();
    const Rat tau = eps / (8 * rat_max(mdp_.max_abs_reward(), Rat(1)));

    std::vector<Rat> grid;
    grid.push_back(r_lo);
    grid.push_back(r_hi);
    Rat z0 = floor_to_multiple(r_lo, tau);
    if (z0 < r_lo) z0 += tau;
    for (Rat z = z0; z <= r_hi; z += tau) grid.push_back(z);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    for (const Rat& z : grid) {
        auto x = clamp_xc(sys_.bounds, z);
        const Envelope& env = envelope_for(x);
        auto hit = envelope_feasible(env, u, v);
        if (!hit) continue;

        GlobalCheckResult res;
        res.yes = true;
        if (build_witness) {
            GlobalWitness w;
            w.assignment = hit->assignment;
            w.x_per_mec = x;
            w.z_bar = z;
            w.mean = hit->m;
            w.variance = hit->g - hit->m * hit->m;
            w.strategy = synthesize_global(mdp_, sys_, w.assignment, w.x_per_mec);
            res.witness = std::move(w);
        }
        return res;
    }
    return GlobalCheckResult{};
}

GlobalCheckResult approx_check_global(const Mdp& mdp, int s0, const Rat& u, const Rat& v,
                                      const Rat& eps) {
    GlobalChecker checker(mdp, s0);
    return checker.check(u, v, eps);
}

StochasticUpdateStrategy synthesize_global(const Mdp& mdp, const GlobalSystem& sys,
                                           const std::vector<Rat>& assignment,
                                           const std::vector<Rat>& x_per_mec) {
    StochasticUpdateStrategy st;
    st.memory = {"m1", "m2"};
    st.next_move.assign(mdp.num_states(), std::vector<Dist>(2));
    st.memory_update.assign(
        mdp.num_actions(),
        std::vector<std::vector<Dist>>(mdp.num_states(), std::vector<Dist>(2)));

    auto y_state = [&](int s) { return assignment[sys.y_state_var[s]]; };
    auto y_action = [&](int a) { return assignment[sys.y_action_var[a]]; };

    // Switch probability per state: y_s / (y_s + sum of y_a over Act(s)).
    std::vector<Rat> switch_prob(mdp.num_states(), 0);
    for (int s = 0; s < mdp.num_states(); ++s) {
        Rat denom = y_state(s);
        for (int a : mdp.enabled(s)) denom += y_action(a);
        if (denom > 0 && y_state(s) > 0) switch_prob[s] = y_state(s) / denom;
    }

    // m1: play proportionally to the transient action flow.
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

    // m2: play sigma_{x_C} inside each MEC that carries trapped mass.
    for (int s = 0; s < mdp.num_states(); ++s)
        st.next_move[s][1] = {{mdp.enabled(s).front(), Rat(1)}};
    for (std::size_t c = 0; c < sys.mecs.size(); ++c) {
        Rat mass = 0;
        for (const auto& [var, coeff] : sys.mec_mass[c]) mass += coeff * assignment[var];
        if (mass == 0) continue;
        auto restriction = restrict_to_mec(mdp, sys.mecs[c]);
        MecStrategy inner = sigma_zc(restriction.mdp, x_per_mec[c]);
        for (int ls = 0; ls < restriction.mdp.num_states(); ++ls) {
            Dist d;
            for (const auto& [la, p] : inner.per_state[ls])
                d.push_back({restriction.action_to_parent[la], p});
            std::sort(d.begin(), d.end());
            st.next_move[restriction.state_to_parent[ls]][1] = std::move(d);
        }
    }

    // Memory update on arrival: switch with switch_prob, stay switched in m2.
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

    // The initial visit offers the same switch chance.
    int start = sys.s0;
    if (switch_prob[start] == 0)
        st.initial_memory = {{0, Rat(1)}};
    else if (switch_prob[start] == 1)
        st.initial_memory = {{1, Rat(1)}};
    else
        st.initial_memory = {{0, 1 - switch_prob[start]}, {1, switch_prob[start]}};
    return st;
}

}  // namespace mdpstab
