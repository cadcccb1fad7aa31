#include "mdpstab/lp.hpp"

#include <cassert>
#include <stdexcept>

namespace mdpstab {

int LinearProgram::add_variable(const std::string& name, bool nonnegative) {
    variables.push_back(name);
    nonneg.push_back(nonnegative);
    return static_cast<int>(variables.size()) - 1;
}

void LinearProgram::add_row(std::vector<std::pair<int, Rat>> coeffs, Rel rel, Rat rhs) {
    for (const auto& [v, c] : coeffs) {
        if (v < 0 || v >= num_variables())
            throw std::out_of_range("LinearProgram row references unknown variable");
        (void)c;
    }
    rows.push_back(Row{std::move(coeffs), rel, std::move(rhs)});
}

namespace {

/// Dense tableau in standard form  min c'x  s.t.  Ax = b, x >= 0, b >= 0.
/// Free input variables are split into positive and negative parts.
struct Tableau {
    int m, n;
    std::vector<std::vector<Rat>> a;  // m rows of n coefficients + rhs
    std::vector<int> basis;           // per row, the basic column

    Tableau(int rows, int cols)
        : m(rows), n(cols), a(rows, std::vector<Rat>(cols + 1, 0)), basis(rows, -1) {}

    Rat& at(int r, int c) { return a[r][c]; }
    Rat& rhs(int r) { return a[r][n]; }

    void pivot(int r, int c) {
        Rat p = a[r][c];
        for (int j = 0; j <= n; ++j) a[r][j] /= p;
        for (int i = 0; i < m; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rat f = a[i][c];
            for (int j = 0; j <= n; ++j) a[i][j] -= f * a[r][j];
        }
        basis[r] = c;
    }

    /// Reduced costs for `cost` with basic columns priced out.
    std::vector<Rat> reduced_costs(const std::vector<Rat>& cost) const {
        std::vector<Rat> red = cost;
        for (int i = 0; i < m; ++i) {
            const Rat& cb = cost[basis[i]];
            if (cb == 0) continue;
            for (int j = 0; j < n; ++j)
                if (a[i][j] != 0) red[j] -= cb * a[i][j];
        }
        return red;
    }

    Rat basic_value(const std::vector<Rat>& cost) const {
        Rat v = 0;
        for (int i = 0; i < m; ++i) v += cost[basis[i]] * a[i][n];
        return v;
    }

    /// Simplex under Bland's rule; entering columns limited to [0, col_limit).
    /// Returns false when an unbounded direction is found.
    bool run(const std::vector<Rat>& cost, int col_limit) {
        auto red = reduced_costs(cost);
        while (true) {
            int enter = -1;
            for (int j = 0; j < col_limit; ++j)
                if (red[j] < 0) {
                    enter = j;
                    break;
                }
            if (enter < 0) return true;
            int leave = -1;
            Rat best_ratio = 0;
            for (int i = 0; i < m; ++i) {
                const Rat& aie = a[i][enter];
                if (aie <= 0) continue;
                Rat ratio = a[i][n] / aie;
                if (leave < 0 || ratio < best_ratio ||
                    (ratio == best_ratio && basis[i] < basis[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
            Rat f = red[enter];
            for (int j = 0; j < n; ++j)
                if (a[leave][j] != 0) red[j] -= f * a[leave][j];
        }
    }
};

}  // namespace

LpOutcome solve_lp(const LinearProgram& lp) {
    const int n_in = lp.num_variables();
    const int m = static_cast<int>(lp.rows.size());

    // Column layout: structural (split free vars), slack/surplus, artificials.
    std::vector<int> var_pos_col(n_in, -1), var_neg_col(n_in, -1);
    int cols = 0;
    for (int v = 0; v < n_in; ++v) {
        var_pos_col[v] = cols++;
        if (!lp.nonneg[v]) var_neg_col[v] = cols++;
    }
    const int slack_base = cols;
    for (const auto& row : lp.rows)
        if (row.rel != Rel::Eq) ++cols;
    const int art_base = cols;
    const int total = art_base + m;

    Tableau tab(m, total);
    int slack = slack_base;
    for (int i = 0; i < m; ++i) {
        const auto& row = lp.rows[i];
        Rat sign = row.rhs < 0 ? Rat(-1) : Rat(1);
        for (const auto& [v, c] : row.coeffs) {
            tab.at(i, var_pos_col[v]) += sign * c;
            if (var_neg_col[v] >= 0) tab.at(i, var_neg_col[v]) -= sign * c;
        }
        tab.rhs(i) = sign * row.rhs;
        if (row.rel != Rel::Eq)
            tab.at(i, slack++) = sign * (row.rel == Rel::Le ? Rat(1) : Rat(-1));
        tab.at(i, art_base + i) = 1;
        tab.basis[i] = art_base + i;
    }

    // Phase 1: minimize the sum of artificials.
    std::vector<Rat> phase1(total, 0);
    for (int i = 0; i < m; ++i) phase1[art_base + i] = 1;
    bool ok = tab.run(phase1, total);
    assert(ok);
    (void)ok;
    if (tab.basic_value(phase1) != 0) return LpOutcome{LpStatus::Infeasible, {}, std::nullopt};

    // Drive leftover artificials out of the basis where possible. A row whose
    // structural coefficients are all zero is redundant; its artificial stays
    // basic at zero and no structural pivot can ever change it.
    for (int i = 0; i < m; ++i) {
        if (tab.basis[i] < art_base) continue;
        for (int j = 0; j < art_base; ++j)
            if (tab.at(i, j) != 0) {
                tab.pivot(i, j);
                break;
            }
    }

    auto extract = [&]() {
        std::vector<Rat> x(n_in, 0);
        for (int v = 0; v < n_in; ++v) {
            for (int i = 0; i < m; ++i) {
                if (tab.basis[i] == var_pos_col[v]) x[v] += tab.rhs(i);
                if (var_neg_col[v] >= 0 && tab.basis[i] == var_neg_col[v]) x[v] -= tab.rhs(i);
            }
        }
        return x;
    };

    if (!lp.objective) return LpOutcome{LpStatus::Feasible, extract(), std::nullopt};

    std::vector<Rat> cost(total, 0);
    for (const auto& [v, c] : lp.objective->coeffs) {
        Rat cc = lp.objective->maximize ? Rat(-c) : c;
        cost[var_pos_col[v]] += cc;
        if (var_neg_col[v] >= 0) cost[var_neg_col[v]] -= cc;
    }
    if (!tab.run(cost, art_base)) return LpOutcome{LpStatus::Unbounded, {}, std::nullopt};

    auto x = extract();
    Rat value = 0;
    for (const auto& [v, c] : lp.objective->coeffs) value += c * x[v];
    return LpOutcome{LpStatus::Optimal, std::move(x), value};
}

}  // namespace mdpstab
