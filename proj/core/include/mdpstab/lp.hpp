#pragma once

#include "mdpstab/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mdpstab {

enum class Rel { Le, Eq, Ge };

/// Linear program over named variables. Variables listed in `nonneg` carry an
/// implicit >= 0 bound; all others are free. Without an objective, solve_lp
/// answers the pure feasibility question.
struct LinearProgram {
    struct Row {
        std::vector<std::pair<int, Rat>> coeffs;  // (variable index, coefficient)
        Rel rel = Rel::Eq;
        Rat rhs;
    };
    struct Objective {
        bool maximize = false;
        std::vector<std::pair<int, Rat>> coeffs;
    };

    std::vector<std::string> variables;
    std::vector<Row> rows;
    std::optional<Objective> objective;
    std::vector<bool> nonneg;  // per variable; resized on add_variable

    int add_variable(const std::string& name, bool nonnegative = true);
    void add_row(std::vector<std::pair<int, Rat>> coeffs, Rel rel, Rat rhs);
    int num_variables() const { return static_cast<int>(variables.size()); }
};

enum class LpStatus { Optimal, Feasible, Infeasible, Unbounded };

struct LpOutcome {
    LpStatus status = LpStatus::Infeasible;
    std::vector<Rat> assignment;            // per variable, when Optimal/Feasible
    std::optional<Rat> objective_value;
};

/// Exact two-phase primal simplex with Bland's pivoting rule. Deterministic;
/// the assignment satisfies every constraint with exact rational equality.
LpOutcome solve_lp(const LinearProgram& lp);

}  // namespace mdpstab
