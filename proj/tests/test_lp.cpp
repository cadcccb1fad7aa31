#include "mdpstab/lp.hpp"

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace mdpstab;

TEST_CASE("one-variable maximization") {
    LinearProgram lp;
    int x = lp.add_variable("x");
    lp.add_row({{x, Rat(1)}}, Rel::Le, Rat(3));
    lp.objective = LinearProgram::Objective{true, {{x, Rat(1)}}};
    auto out = solve_lp(lp);
    CHECK(out.status == LpStatus::Optimal);
    CHECK(*out.objective_value == Rat(3));
    CHECK(out.assignment[x] == Rat(3));
}

TEST_CASE("contradictory bounds are infeasible") {
    LinearProgram lp;
    int x = lp.add_variable("x");
    lp.add_row({{x, Rat(1)}}, Rel::Ge, Rat(1));
    lp.add_row({{x, Rat(1)}}, Rel::Le, Rat(0));
    lp.objective = LinearProgram::Objective{true, {{x, Rat(1)}}};
    CHECK(solve_lp(lp).status == LpStatus::Infeasible);
}

TEST_CASE("unbounded direction is detected") {
    LinearProgram lp;
    int x = lp.add_variable("x");
    lp.add_row({{x, Rat(1)}}, Rel::Ge, Rat(1));
    lp.objective = LinearProgram::Objective{true, {{x, Rat(1)}}};
    CHECK(solve_lp(lp).status == LpStatus::Unbounded);
}

TEST_CASE("free variables can go negative") {
    LinearProgram lp;
    int x = lp.add_variable("x", false);
    lp.add_row({{x, Rat(1)}}, Rel::Ge, Rat(-5));
    lp.objective = LinearProgram::Objective{false, {{x, Rat(1)}}};
    auto out = solve_lp(lp);
    CHECK(out.status == LpStatus::Optimal);
    CHECK(*out.objective_value == Rat(-5));
}

TEST_CASE("feasibility-only programs report an exact assignment") {
    LinearProgram lp;
    int x = lp.add_variable("x");
    int y = lp.add_variable("y");
    lp.add_row({{x, Rat(1)}, {y, Rat(2)}}, Rel::Eq, Rat(2));
    lp.add_row({{x, Rat(1)}}, Rel::Le, Rat(1));
    auto out = solve_lp(lp);
    REQUIRE(out.status == LpStatus::Feasible);
    CHECK(out.assignment[x] + 2 * out.assignment[y] == Rat(2));
    CHECK(out.assignment[x] <= Rat(1));
}

TEST_CASE("flow LP of the unichain MEC maximizes to 2") {
    // max 2 x_b + 2 x_c subject to the frequency-function constraints.
    LinearProgram lp;
    int xa = lp.add_variable("x_a"), xb = lp.add_variable("x_b"), xc = lp.add_variable("x_c");
    // s1: inflow x_c equals outflow x_a + x_b; s2 gives the mirror equation.
    lp.add_row({{xc, Rat(1)}, {xa, Rat(-1)}, {xb, Rat(-1)}}, Rel::Eq, Rat(0));
    lp.add_row({{xa, Rat(1)}, {xb, Rat(1)}, {xc, Rat(-1)}}, Rel::Eq, Rat(0));
    lp.add_row({{xa, Rat(1)}, {xb, Rat(1)}, {xc, Rat(1)}}, Rel::Eq, Rat(1));
    lp.objective = LinearProgram::Objective{true, {{xb, Rat(2)}, {xc, Rat(2)}}};
    auto out = solve_lp(lp);
    REQUIRE(out.status == LpStatus::Optimal);
    CHECK(*out.objective_value == Rat(2));
    CHECK(out.assignment[xb] == Rat(1, 2));
    CHECK(out.assignment[xc] == Rat(1, 2));
}

TEST_CASE("assignments satisfy every constraint exactly") {
    std::mt19937_64 rng(20240818);
    for (int round = 0; round < 100; ++round) {
        LinearProgram lp = oracles::random_bounded_lp(rng, 4);
        auto out = solve_lp(lp);
        if (out.status != LpStatus::Optimal) continue;
        for (const auto& row : lp.rows) {
            Rat lhs = 0;
            for (const auto& [v, c] : row.coeffs) lhs += c * out.assignment[v];
            switch (row.rel) {
                case Rel::Le: CHECK(lhs <= row.rhs); break;
                case Rel::Ge: CHECK(lhs >= row.rhs); break;
                case Rel::Eq: CHECK(lhs == row.rhs); break;
            }
        }
        for (int v = 0; v < lp.num_variables(); ++v)
            if (lp.nonneg[v]) CHECK(out.assignment[v] >= 0);
    }
}

TEST_CASE("simplex agrees with the vertex-enumeration oracle") {
    std::mt19937_64 rng(17);
    for (int round = 0; round < 50; ++round) {
        LinearProgram lp = oracles::random_bounded_lp(rng, 4);
        auto fast = solve_lp(lp);
        auto slow = oracles::vertex_enumeration_lp(lp);
        CAPTURE(round);
        CHECK(fast.status == slow.status);
        if (fast.status == LpStatus::Optimal) CHECK(*fast.objective_value == *slow.objective_value);
    }
}
