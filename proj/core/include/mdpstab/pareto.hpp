#pragma once

#include "mdpstab/model.hpp"

#include <string>
#include <utility>
#include <vector>

namespace mdpstab {

enum class VarianceKind { Global, Local, Hybrid };

std::string to_string(VarianceKind kind);

struct ParetoCell {
    Rat u, v;
    bool yes = false;
    double elapsed_ms = 0;
    std::string witness_file;  // empty unless witness output was requested
};

struct ParetoGridResult {
    VarianceKind kind = VarianceKind::Global;
    Rat eps;
    Rat radius;  // R = max |r(a)|
    std::vector<ParetoCell> cells;                // u-major, v ascending within u
    std::vector<std::pair<Rat, Rat>> staircase;   // non-dominated Yes corners
};

/// Runs the kind-appropriate checker over the eps-grid of
/// [-R, R] x [0, R^2], verifying every Yes by exact re-analysis of its
/// synthesized witness before the cell is marked. Witness strategy files are
/// written only when `witness_dir` is non-empty.
ParetoGridResult pareto(const Mdp& mdp, int s0, VarianceKind kind, const Rat& eps,
                        const std::string& witness_dir = "");

std::string pareto_to_csv(const ParetoGridResult& grid);
std::string pareto_to_json(const ParetoGridResult& grid);

/// Grid rows (kind, u, v, answer) parsed back from either encoding, for the
/// round-trip guarantee.
struct ParetoRow {
    std::string kind;
    Rat u, v;
    bool yes;
    bool operator==(const ParetoRow&) const = default;
};
std::vector<ParetoRow> pareto_rows_from_csv(const std::string& text);
std::vector<ParetoRow> pareto_rows_from_json(const std::string& text);

}  // namespace mdpstab
