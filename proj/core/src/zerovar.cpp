#include "mdpstab/zerovar.hpp"

#include "mdpstab/global.hpp"

#include <algorithm>
#include <set>

namespace mdpstab {

namespace {

std::vector<Rat> distinct_rewards(const Mdp& mdp) {
    std::vector<Rat> rewards;
    for (int a = 0; a < mdp.num_actions(); ++a) rewards.push_back(mdp.action(a).reward);
    std::sort(rewards.begin(), rewards.end());
    rewards.erase(std::unique(rewards.begin(), rewards.end()), rewards.end());
    return rewards;
}

std::string fresh_prefix(const Mdp& mdp, std::string prefix) {
    auto collides = [&](const std::string& p) {
        for (int s = 0; s < mdp.num_states(); ++s)
            if (mdp.state_name(s).rfind(p, 0) == 0) return true;
        for (int a = 0; a < mdp.num_actions(); ++a)
            if (mdp.action(a).id.rfind(p, 0) == 0) return true;
        return false;
    };
    while (collides(prefix)) prefix = "_" + prefix;
    return prefix;
}

}  // namespace

BetaFunction zero_hybrid_all(const Mdp& mdp) {
    BetaFunction out;
    out.beta.assign(mdp.num_states(), std::nullopt);
    out.witness_action.assign(mdp.num_states(), -1);
    out.class_index.assign(mdp.num_states(), -1);

    auto rewards = distinct_rewards(mdp);
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        std::vector<int> cls;
        for (int a = 0; a < mdp.num_actions(); ++a)
            if (mdp.action(a).reward == rewards[i]) cls.push_back(a);
        auto res = almost_sure_cobuchi(mdp, cls);
        for (int s : res.winning) {
            if (out.beta[s]) continue;  // classes scanned in increasing order
            out.beta[s] = rewards[i];
            out.witness_action[s] = res.witness.choice[s];
            out.class_index[s] = static_cast<int>(i);
        }
    }
    return out;
}

ZeroVarAnswer zero_hybrid(const Mdp& mdp, int s0) {
    auto rewards = distinct_rewards(mdp);
    for (const Rat& beta : rewards) {
        std::vector<int> cls;
        for (int a = 0; a < mdp.num_actions(); ++a)
            if (mdp.action(a).reward == beta) cls.push_back(a);
        auto res = almost_sure_cobuchi(mdp, cls);
        if (!std::binary_search(res.winning.begin(), res.winning.end(), s0)) continue;
        ZeroVarAnswer ans;
        ans.value = beta;
        ans.witness = lift(mdp, res.witness);
        return ans;
    }
    return ZeroVarAnswer{};
}

ZeroVarAnswer zero_local(const Mdp& mdp, int s0) {
    BetaFunction all = zero_hybrid_all(mdp);

    Rat max_beta = 0;
    bool any = false;
    for (const auto& b : all.beta)
        if (b) {
            max_beta = any ? rat_max(max_beta, *b) : *b;
            any = true;
        }
    if (!any) return ZeroVarAnswer{};
    const Rat offset = max_beta + 1;

    // G-bar: absorbing post-states behind switch actions of reward
    // beta(s) - offset; every original action is re-weighted to reward 0.
    const std::string bar = fresh_prefix(mdp, "bar:");
    const std::string sw = fresh_prefix(mdp, "switch:");
    const std::string stay = fresh_prefix(mdp, "stay:");
    RawMdp raw;
    for (int s = 0; s < mdp.num_states(); ++s) raw.states.push_back(mdp.state_name(s));
    for (int s = 0; s < mdp.num_states(); ++s)
        if (all.beta[s]) raw.states.push_back(bar + mdp.state_name(s));
    raw.initial = mdp.state_name(s0);
    for (int a = 0; a < mdp.num_actions(); ++a) {
        const auto& act = mdp.action(a);
        RawAction ra{act.id, mdp.state_name(act.source), Rat(0), {}};
        for (const auto& [t, p] : act.transitions)
            ra.transitions.push_back({mdp.state_name(t), p});
        raw.actions.push_back(std::move(ra));
    }
    std::vector<std::string> switch_ids(mdp.num_states());
    for (int s = 0; s < mdp.num_states(); ++s) {
        if (!all.beta[s]) continue;
        switch_ids[s] = sw + mdp.state_name(s);
        raw.actions.push_back(RawAction{switch_ids[s], mdp.state_name(s), *all.beta[s] - offset,
                                        {{bar + mdp.state_name(s), Rat(1)}}});
        raw.actions.push_back(RawAction{stay + mdp.state_name(s), bar + mdp.state_name(s), Rat(0),
                                        {{bar + mdp.state_name(s), Rat(1)}}});
    }
    Mdp gbar = validate_mdp(raw);

    std::vector<int> target;
    for (int s = 0; s < mdp.num_states(); ++s)
        if (all.beta[s]) target.push_back(gbar.state_index(bar + mdp.state_name(s)));
    std::sort(target.begin(), target.end());

    auto cumulative = min_cumulative_reward_as_reach(gbar, target);
    int s0_bar = gbar.state_index(mdp.state_name(s0));
    if (!std::binary_search(cumulative.winning.begin(), cumulative.winning.end(), s0_bar))
        return ZeroVarAnswer{};

    ZeroVarAnswer ans;
    ans.value = cumulative.value[s0_bar] + offset;

    // 2-memory pure witness: follow the G-bar policy, flip to the frozen
    // class witness at states where it switches.
    std::vector<char> switches(mdp.num_states(), 0);
    std::vector<int> reach_action(mdp.num_states(), -1);
    for (int s = 0; s < mdp.num_states(); ++s) {
        int sb = gbar.state_index(mdp.state_name(s));
        int choice = cumulative.witness.choice[sb];
        const std::string& id = gbar.action(choice).id;
        if (all.beta[s] && id == switch_ids[s])
            switches[s] = 1;
        else
            reach_action[s] = mdp.action_index(id);
    }

    StochasticUpdateStrategy st;
    st.memory = {"m1", "m2"};
    st.next_move.assign(mdp.num_states(), std::vector<Dist>(2));
    st.memory_update.assign(
        mdp.num_actions(),
        std::vector<std::vector<Dist>>(mdp.num_states(), std::vector<Dist>(2)));
    for (int s = 0; s < mdp.num_states(); ++s) {
        int m1_action = reach_action[s] >= 0 ? reach_action[s] : mdp.enabled(s).front();
        int m2_action = all.witness_action[s] >= 0 ? all.witness_action[s]
                                                   : mdp.enabled(s).front();
        st.next_move[s][0] = {{m1_action, Rat(1)}};
        st.next_move[s][1] = {{m2_action, Rat(1)}};
    }
    for (int a = 0; a < mdp.num_actions(); ++a)
        for (int t = 0; t < mdp.num_states(); ++t) {
            st.memory_update[a][t][0] = {{switches[t] ? 1 : 0, Rat(1)}};
            st.memory_update[a][t][1] = {{1, Rat(1)}};
        }
    st.initial_memory = {{switches[s0] ? 1 : 0, Rat(1)}};
    ans.witness = std::move(st);
    return ans;
}

ZeroVarAnswer zero_global(const Mdp& mdp, int s0) {
    auto mecs = mec_decomposition(mdp);
    std::vector<PayoffInterval> bounds;
    for (const Mec& mec : mecs) bounds.push_back(mec_payoff_bounds(mdp, mec));

    std::vector<Rat> levels;
    for (const auto& b : bounds) levels.push_back(b.alpha);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    for (const Rat& level : levels) {
        std::vector<std::size_t> eligible;
        std::vector<int> target;
        for (std::size_t c = 0; c < mecs.size(); ++c)
            if (bounds[c].alpha <= level && level <= bounds[c].beta) {
                eligible.push_back(c);
                target.insert(target.end(), mecs[c].states.begin(), mecs[c].states.end());
            }
        std::sort(target.begin(), target.end());
        auto reach = almost_sure_reach(mdp, target);
        if (!std::binary_search(reach.winning.begin(), reach.winning.end(), s0)) continue;

        ZeroVarAnswer ans;
        ans.value = level;

        StochasticUpdateStrategy st;
        st.memory = {"m1", "m2"};
        st.next_move.assign(mdp.num_states(), std::vector<Dist>(2));
        st.memory_update.assign(
            mdp.num_actions(),
            std::vector<std::vector<Dist>>(mdp.num_states(), std::vector<Dist>(2)));
        std::vector<char> in_target(mdp.num_states(), 0);
        for (int s : target) in_target[s] = 1;
        for (int s = 0; s < mdp.num_states(); ++s) {
            st.next_move[s][0] = {{reach.witness.choice[s], Rat(1)}};
            st.next_move[s][1] = {{mdp.enabled(s).front(), Rat(1)}};
        }
        for (std::size_t c : eligible) {
            auto restriction = restrict_to_mec(mdp, mecs[c]);
            MecStrategy inner = sigma_zc(restriction.mdp, level);
            for (int ls = 0; ls < restriction.mdp.num_states(); ++ls) {
                Dist d;
                for (const auto& [la, p] : inner.per_state[ls])
                    d.push_back({restriction.action_to_parent[la], p});
                std::sort(d.begin(), d.end());
                st.next_move[restriction.state_to_parent[ls]][1] = std::move(d);
            }
        }
        for (int a = 0; a < mdp.num_actions(); ++a)
            for (int t = 0; t < mdp.num_states(); ++t) {
                st.memory_update[a][t][0] = {{in_target[t] ? 1 : 0, Rat(1)}};
                st.memory_update[a][t][1] = {{1, Rat(1)}};
            }
        st.initial_memory = {{in_target[s0] ? 1 : 0, Rat(1)}};
        ans.witness = std::move(st);
        return ans;
    }
    return ZeroVarAnswer{};
}

}  // namespace mdpstab
