#include "support/fixtures.hpp"

namespace mdpstab::fixtures {

Mdp m_glob() {
    RawMdp raw;
    raw.states = {"s1", "s2", "s3", "s4"};
    raw.initial = "s1";
    raw.actions = {
        {"a", "s1", Rat(0), {{"s2", Rat(1, 2)}, {"s3", Rat(1, 2)}}},
        {"b", "s2", Rat(4), {{"s2", Rat(1)}}},
        {"c", "s3", Rat(5), {{"s3", Rat(1)}}},
        {"d", "s3", Rat(0), {{"s4", Rat(1)}}},
        {"e", "s4", Rat(0), {{"s4", Rat(1)}}},
    };
    return validate_mdp(raw);
}

Mdp m_uni() {
    RawMdp raw;
    raw.states = {"s1", "s2"};
    raw.initial = "s1";
    raw.actions = {
        {"a", "s1", Rat(0), {{"s2", Rat(1)}}},
        {"b", "s1", Rat(2), {{"s2", Rat(1)}}},
        {"c", "s2", Rat(2), {{"s1", Rat(1)}}},
    };
    return validate_mdp(raw);
}

StochasticUpdateStrategy glob_first_visit_strategy(const Mdp& g) {
    StochasticUpdateStrategy st;
    st.memory = {"fresh", "settled"};
    st.initial_memory = {{0, Rat(1)}};
    const int s1 = g.state_index("s1"), s2 = g.state_index("s2"), s3 = g.state_index("s3"),
              s4 = g.state_index("s4");
    const int a = g.action_index("a"), b = g.action_index("b"), c = g.action_index("c"),
              d = g.action_index("d"), e = g.action_index("e");
    st.next_move.assign(g.num_states(), std::vector<Dist>(2));
    for (int m = 0; m < 2; ++m) {
        st.next_move[s1][m] = {{a, Rat(1)}};
        st.next_move[s2][m] = {{b, Rat(1)}};
        st.next_move[s4][m] = {{e, Rat(1)}};
    }
    st.next_move[s3][0] = {{c, Rat(4, 5)}, {d, Rat(1, 5)}};
    st.next_move[s3][1] = {{c, Rat(1)}};
    st.memory_update.assign(g.num_actions(),
                            std::vector<std::vector<Dist>>(g.num_states(), std::vector<Dist>(2)));
    for (int act = 0; act < g.num_actions(); ++act)
        for (int t = 0; t < g.num_states(); ++t)
            for (int m = 0; m < 2; ++m) st.memory_update[act][t][m] = {{m, Rat(1)}};
    // Settle after the first decision at s3 (entering s3 via c).
    st.memory_update[c][s3][0] = {{1, Rat(1)}};
    return st;
}

StochasticUpdateStrategy uni_commit_strategy(const Mdp& g) {
    StochasticUpdateStrategy st;
    st.memory = {"pick_b", "pick_a"};
    st.initial_memory = {{0, Rat(1, 2)}, {1, Rat(1, 2)}};
    const int s1 = g.state_index("s1"), s2 = g.state_index("s2");
    const int a = g.action_index("a"), b = g.action_index("b"), c = g.action_index("c");
    st.next_move.assign(g.num_states(), std::vector<Dist>(2));
    st.next_move[s1][0] = {{b, Rat(1)}};
    st.next_move[s1][1] = {{a, Rat(1)}};
    st.next_move[s2][0] = {{c, Rat(1)}};
    st.next_move[s2][1] = {{c, Rat(1)}};
    st.memory_update.assign(g.num_actions(),
                            std::vector<std::vector<Dist>>(g.num_states(), std::vector<Dist>(2)));
    for (int act = 0; act < g.num_actions(); ++act)
        for (int t = 0; t < g.num_states(); ++t)
            for (int m = 0; m < 2; ++m) st.memory_update[act][t][m] = {{m, Rat(1)}};
    return st;
}

StochasticUpdateStrategy uni_uniform_strategy(const Mdp& g) {
    const int s1 = g.state_index("s1"), s2 = g.state_index("s2");
    const int a = g.action_index("a"), b = g.action_index("b"), c = g.action_index("c");
    std::vector<Dist> per_state(g.num_states());
    per_state[s1] = {{a, Rat(1, 2)}, {b, Rat(1, 2)}};
    per_state[s2] = {{c, Rat(1)}};
    return lift_randomized(g, per_state);
}

MemorylessDeterministicStrategy md_by_ids(const Mdp& mdp,
                                          const std::vector<std::string>& action_ids) {
    MemorylessDeterministicStrategy md;
    md.choice.resize(mdp.num_states());
    for (int s = 0; s < mdp.num_states(); ++s) md.choice[s] = mdp.action_index(action_ids[s]);
    return md;
}

}  // namespace mdpstab::fixtures
