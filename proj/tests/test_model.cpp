#include "mdpstab/model.hpp"

#include "mdpstab/graph.hpp"
#include "mdpstab/io.hpp"
#include "support/fixtures.hpp"

#include <doctest.h>

using namespace mdpstab;

TEST_CASE("validate_mdp accepts the four-state fixture") {
    Mdp g = fixtures::m_glob();
    CHECK(g.num_states() == 4);
    CHECK(g.num_actions() == 5);
    CHECK(g.state_name(g.initial_state()) == "s1");
    CHECK(g.enabled(g.state_index("s3")).size() == 2);
}

TEST_CASE("validate_mdp accepts the smallest legal MDP") {
    RawMdp raw;
    raw.states = {"s"};
    raw.initial = "s";
    raw.actions = {{"loop", "s", Rat(0), {{"s", Rat(1)}}}};
    Mdp m = validate_mdp(raw);
    CHECK(m.num_states() == 1);
    CHECK(m.num_actions() == 1);
}

TEST_CASE("validate_mdp rejects bad models") {
    RawMdp raw;
    raw.states = {"s", "t"};
    raw.initial = "s";

    SUBCASE("distribution sums below one") {
        raw.actions = {{"a", "s", Rat(0), {{"t", Rat(9, 10)}}},
                       {"b", "t", Rat(0), {{"t", Rat(1)}}}};
        CHECK_THROWS_WITH_AS(validate_mdp(raw), doctest::Contains("BadDistribution"),
                             ModelError);
    }
    SUBCASE("state without actions") {
        raw.actions = {{"a", "s", Rat(0), {{"t", Rat(1)}}}};
        CHECK_THROWS_WITH_AS(validate_mdp(raw), doctest::Contains("EmptyActSet"), ModelError);
    }
    SUBCASE("unknown transition target") {
        raw.actions = {{"a", "s", Rat(0), {{"nowhere", Rat(1)}}},
                       {"b", "t", Rat(0), {{"t", Rat(1)}}}};
        CHECK_THROWS_WITH_AS(validate_mdp(raw), doctest::Contains("UnknownTarget"), ModelError);
    }
    SUBCASE("duplicate action id") {
        raw.actions = {{"a", "s", Rat(0), {{"t", Rat(1)}}},
                       {"a", "t", Rat(0), {{"t", Rat(1)}}}};
        CHECK_THROWS_WITH_AS(validate_mdp(raw), doctest::Contains("DuplicateId"), ModelError);
    }
}

TEST_CASE("validation is idempotent through the JSON round trip") {
    Mdp g = fixtures::m_glob();
    Mdp again = mdp_from_json_text(mdp_to_json_text(g));
    CHECK(mdp_to_json_text(again) == mdp_to_json_text(g));
}

TEST_CASE("induce_chain on a memoryless strategy of m_glob") {
    Mdp g = fixtures::m_glob();
    auto md = fixtures::md_by_ids(g, {"a", "b", "c", "e"});
    auto chain = induce_chain(g, lift(g, md), g.state_index("s1"));
    // s4 stays unreachable: always-c never plays d.
    CHECK(chain.num_locations() == 3);
    for (int i = 0; i < chain.num_locations(); ++i) {
        Rat sum = 0;
        for (const auto& [j, p] : chain.edges[i]) sum += p;
        CHECK(sum == Rat(1));
    }
}

TEST_CASE("induce_chain on the 1-state self-loop") {
    RawMdp raw;
    raw.states = {"s"};
    raw.initial = "s";
    raw.actions = {{"loop", "s", Rat(0), {{"s", Rat(1)}}}};
    Mdp m = validate_mdp(raw);
    MemorylessDeterministicStrategy md{{0}};
    auto chain = induce_chain(m, lift(m, md), 0);
    CHECK(chain.num_locations() == 1);
    REQUIRE(chain.edges[0].size() == 1);
    CHECK(chain.edges[0][0] == std::pair<int, Rat>{0, Rat(1)});
}

TEST_CASE("induce_chain of the first-visit strategy has three loop BSCCs") {
    Mdp g = fixtures::m_glob();
    auto chain = induce_chain(g, fixtures::glob_first_visit_strategy(g), g.state_index("s1"));
    auto comps = bsccs(chain);
    CHECK(comps.size() == 3);
    for (const auto& b : comps) CHECK(b.locations.size() == 1);
}

TEST_CASE("induce_chain rows are stochastic for a randomized strategy") {
    Mdp g = fixtures::m_uni();
    auto chain = induce_chain(g, fixtures::uni_commit_strategy(g), g.state_index("s1"));
    Rat init = 0;
    for (const auto& [l, p] : chain.initial) init += p;
    CHECK(init == Rat(1));
    for (int i = 0; i < chain.num_locations(); ++i) {
        Rat sum = 0;
        for (const auto& [j, p] : chain.edges[i]) sum += p;
        CHECK(sum == Rat(1));
    }
}

TEST_CASE("restrict_to_mec extracts the singleton loop") {
    Mdp g = fixtures::m_glob();
    Mec mec{{g.state_index("s3")}, {g.action_index("c")}};
    auto restriction = restrict_to_mec(g, mec);
    CHECK(restriction.mdp.num_states() == 1);
    CHECK(restriction.mdp.num_actions() == 1);
    CHECK(restriction.mdp.action(0).reward == Rat(5));
}

TEST_CASE("restrict_to_mec of a strongly connected MDP is the identity") {
    Mdp g = fixtures::m_uni();
    Mec mec{{0, 1}, {0, 1, 2}};
    auto restriction = restrict_to_mec(g, mec);
    CHECK(restriction.mdp.num_states() == g.num_states());
    CHECK(restriction.mdp.num_actions() == g.num_actions());
}

TEST_CASE("restrict_to_mec rejects a leaking pair") {
    Mdp g = fixtures::m_glob();
    Mec bogus{{g.state_index("s1")}, {g.action_index("a")}};
    CHECK_THROWS_WITH_AS(restrict_to_mec(g, bogus), doctest::Contains("NotAMec"), ModelError);
}

TEST_CASE("strategy file round trip") {
    Mdp g = fixtures::m_glob();
    auto st = fixtures::glob_first_visit_strategy(g);
    auto text = strategy_to_json_text(g, st);
    auto parsed = strategy_from_json_text(g, text);
    CHECK(strategy_to_json_text(g, parsed) == text);
}
