#include "mdpstab/markov.hpp"

#include "mdpstab/local.hpp"
#include "mdpstab/sim.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mdpstab;

TEST_CASE("payoff intervals of the m_glob MECs") {
    Mdp g = fixtures::m_glob();
    auto mecs = mec_decomposition(g);
    REQUIRE(mecs.size() == 3);
    auto b2 = mec_payoff_bounds(g, mecs[0]);
    auto b3 = mec_payoff_bounds(g, mecs[1]);
    auto b4 = mec_payoff_bounds(g, mecs[2]);
    CHECK(b2.alpha == Rat(4));
    CHECK(b2.beta == Rat(4));
    CHECK(b3.alpha == Rat(5));
    CHECK(b3.beta == Rat(5));
    CHECK(b4.alpha == Rat(0));
    CHECK(b4.beta == Rat(0));
}

TEST_CASE("payoff interval of the unichain fixture is [1,2]") {
    Mdp g = fixtures::m_uni();
    auto mecs = mec_decomposition(g);
    REQUIRE(mecs.size() == 1);
    auto b = mec_payoff_bounds(g, mecs[0]);
    CHECK(b.alpha == Rat(1));
    CHECK(b.beta == Rat(2));
}

TEST_CASE("payoff alpha equals exhaustive MD minimum on small MECs") {
    std::mt19937_64 rng(5150);
    int tested = 0;
    for (int round = 0; round < 40 && tested < 20; ++round) {
        Mdp m = oracles::random_strongly_connected_mdp(rng, 3, 3);
        auto mecs = mec_decomposition(m);
        REQUIRE(mecs.size() == 1);
        auto bounds = mec_payoff_bounds(m, mecs[0]);
        Rat best_min = m.max_reward(), best_max = m.min_reward();
        for (unsigned long long i = 0; i < count_md_strategies(m); ++i) {
            auto md = md_strategy_at(m, i);
            auto stats = md_local_stats(m, md);
            for (int s = 0; s < m.num_states(); ++s) {
                best_min = rat_min(best_min, stats[s].mean_payoff);
                best_max = rat_max(best_max, stats[s].mean_payoff);
            }
        }
        CHECK(bounds.alpha == best_min);
        CHECK(bounds.beta == best_max);
        CHECK(bounds.alpha >= m.min_reward());
        CHECK(bounds.beta <= m.max_reward());
        ++tested;
    }
    CHECK(tested >= 20);
}

TEST_CASE("reach probability of the first-visit strategy's 5-loop is 2/5") {
    Mdp g = fixtures::m_glob();
    auto chain = induce_chain(g, fixtures::glob_first_visit_strategy(g), g.state_index("s1"));
    std::vector<int> target;
    for (int i = 0; i < chain.num_locations(); ++i)
        if (chain.locations[i].state == g.state_index("s3") && chain.locations[i].memory == 1)
            target.push_back(i);
    REQUIRE(!target.empty());
    auto probs = chain_reach_probabilities(chain, target);
    Rat from_start = 0;
    for (const auto& [loc, p] : chain.initial) from_start += p * probs[loc];
    CHECK(from_start == Rat(2, 5));
}

TEST_CASE("reach probability of the full location set is one") {
    Mdp g = fixtures::m_uni();
    auto chain = induce_chain(g, fixtures::uni_uniform_strategy(g), 0);
    std::vector<int> all(chain.num_locations());
    for (int i = 0; i < chain.num_locations(); ++i) all[i] = i;
    for (const Rat& p : chain_reach_probabilities(chain, all)) CHECK(p == Rat(1));
}

TEST_CASE("two symmetric sinks split the probability evenly") {
    RawMdp raw;
    raw.states = {"mid", "left", "right"};
    raw.initial = "mid";
    raw.actions = {
        {"split", "mid", Rat(0), {{"left", Rat(1, 2)}, {"right", Rat(1, 2)}}},
        {"l", "left", Rat(0), {{"left", Rat(1)}}},
        {"r", "right", Rat(1), {{"right", Rat(1)}}},
    };
    Mdp m = validate_mdp(raw);
    auto chain = induce_chain(m, lift(m, fixtures::md_by_ids(m, {"l", "split", "r"})),
                              m.state_index("mid"));
    std::vector<int> left;
    for (int i = 0; i < chain.num_locations(); ++i)
        if (chain.locations[i].state == m.state_index("left")) left.push_back(i);
    auto probs = chain_reach_probabilities(chain, left);
    Rat from_start = 0;
    for (const auto& [loc, p] : chain.initial) from_start += p * probs[loc];
    CHECK(from_start == Rat(1, 2));
}

TEST_CASE("long-run stats of the unichain strategies") {
    Mdp g = fixtures::m_uni();
    SUBCASE("always-a alternates 0 and 2") {
        auto chain = induce_chain(g, lift(g, fixtures::md_by_ids(g, {"a", "c"})), 0);
        auto stats = chain_long_run_stats(chain, 0);
        CHECK(stats.mean_payoff == Rat(1));
        CHECK(stats.local_variance == Rat(1));
    }
    SUBCASE("always-b is constant 2") {
        auto chain = induce_chain(g, lift(g, fixtures::md_by_ids(g, {"b", "c"})), 0);
        auto stats = chain_long_run_stats(chain, 0);
        CHECK(stats.mean_payoff == Rat(2));
        CHECK(stats.local_variance == Rat(0));
    }
}

TEST_CASE("long-run stats of a single loop") {
    RawMdp raw;
    raw.states = {"s"};
    raw.initial = "s";
    raw.actions = {{"l", "s", Rat(5), {{"s", Rat(1)}}}};
    Mdp m = validate_mdp(raw);
    auto chain = induce_chain(m, lift(m, MemorylessDeterministicStrategy{{0}}), 0);
    auto stats = chain_long_run_stats(chain, 0);
    CHECK(stats.mean_payoff == Rat(5));
    CHECK(stats.local_variance == Rat(0));
}

TEST_CASE("chain analysis matches Monte Carlo on the commit strategy") {
    Mdp g = fixtures::m_uni();
    auto strategy = fixtures::uni_commit_strategy(g);
    auto analysis = analyze_chain(induce_chain(g, strategy, 0));
    SimConfig cfg;
    cfg.runs = 4000;
    cfg.horizon = 1500;
    cfg.seed = 11;
    auto stats = simulate(g, strategy, 0, cfg);
    CHECK(std::abs(stats.expected_mean_payoff - to_double(analysis.expected_mean_payoff)) <=
          3 * stats.se_mean_payoff + 1e-6);
}

TEST_CASE("minimal cumulative reward on a hand-built gadget") {
    // s --step(-3)--> goal, or s --loop(0)--> s; goal absorbs with reward 0.
    RawMdp raw;
    raw.states = {"s", "goal"};
    raw.initial = "s";
    raw.actions = {
        {"loop", "s", Rat(0), {{"s", Rat(1)}}},
        {"step", "s", Rat(-3), {{"goal", Rat(1)}}},
        {"stay", "goal", Rat(0), {{"goal", Rat(1)}}},
    };
    Mdp m = validate_mdp(raw);
    auto res = min_cumulative_reward_as_reach(m, {m.state_index("goal")});
    CHECK(res.value[m.state_index("s")] == Rat(-3));
    CHECK(res.value[m.state_index("goal")] == Rat(0));
    CHECK(res.witness.choice[m.state_index("s")] == m.action_index("step"));
}

TEST_CASE("minimal cumulative reward demands almost-sure reachability") {
    // Cheap exit leaks into a dead end; the witness must take the safe one.
    RawMdp raw;
    raw.states = {"s", "goal", "dead"};
    raw.initial = "s";
    raw.actions = {
        {"risky", "s", Rat(-10), {{"goal", Rat(1, 2)}, {"dead", Rat(1, 2)}}},
        {"safe", "s", Rat(-1), {{"goal", Rat(1)}}},
        {"stay", "goal", Rat(0), {{"goal", Rat(1)}}},
        {"rot", "dead", Rat(0), {{"dead", Rat(1)}}},
    };
    Mdp m = validate_mdp(raw);
    auto res = min_cumulative_reward_as_reach(m, {m.state_index("goal")});
    CHECK(res.value[m.state_index("s")] == Rat(-1));
    CHECK(res.witness.choice[m.state_index("s")] == m.action_index("safe"));
    CHECK(!std::binary_search(res.winning.begin(), res.winning.end(), m.state_index("dead")));
}
