#include "mdpstab/pareto.hpp"

#include "mdpstab/global.hpp"
#include "mdpstab/hybrid.hpp"
#include "mdpstab/io.hpp"
#include "mdpstab/local.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mdpstab {

using nlohmann::json;

std::string to_string(VarianceKind kind) {
    switch (kind) {
        case VarianceKind::Global: return "global";
        case VarianceKind::Local: return "local";
        case VarianceKind::Hybrid: return "hybrid";
    }
    return "global";
}

namespace {

int pareto_threads() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("MDPSTAB_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) n = std::min(n, cap);
    }
    return n;
}

struct CellOutcome {
    bool yes = false;
    double elapsed_ms = 0;
    std::string witness_json;  // empty when no witness requested or answer No
};

/// Evaluates one grid cell, including the closed-loop verification of a Yes.
CellOutcome evaluate_cell(const Mdp& mdp, int s0, VarianceKind kind, const Rat& eps,
                          const Rat& u, const Rat& v, GlobalChecker* global_checker,
                          bool want_witness) {
    CellOutcome out;
    auto t0 = std::chrono::steady_clock::now();
    switch (kind) {
        case VarianceKind::Global: {
            auto res = global_checker->check(u, v, eps, true);
            if (res.yes) {
                const auto& w = *res.witness;
                auto analysis = analyze_chain(induce_chain(mdp, w.strategy, s0));
                if (analysis.expected_mean_payoff > u || analysis.variance_of_mean_payoff > v)
                    throw std::runtime_error("pareto: global witness failed re-analysis");
                out.yes = true;
                if (want_witness) out.witness_json = strategy_to_json_text(mdp, w.strategy);
            }
            break;
        }
        case VarianceKind::Local: {
            auto res = check_local(mdp, s0, u, v);
            if (res.answer == LocalAnswer::BudgetExceeded)
                throw std::runtime_error("pareto: local pair budget exceeded");
            if (res.answer == LocalAnswer::Yes) {
                const auto& w = *res.witness;
                if (w.mean > u || w.local_variance > v)
                    throw std::runtime_error("pareto: local witness failed re-analysis");
                out.yes = true;
                if (want_witness) out.witness_json = strategy_to_json_text(mdp, w.strategy);
            }
            break;
        }
        case VarianceKind::Hybrid: {
            auto res = approx_check_hybrid(mdp, s0, u, v, eps);
            if (res.yes) {
                const auto& w = *res.witness;
                if (w.mean > u || w.hybrid_variance > v)
                    throw std::runtime_error("pareto: hybrid witness failed re-analysis");
                out.yes = true;
                if (want_witness) out.witness_json = strategy_to_json_text(mdp, w.strategy);
            }
            break;
        }
    }
    auto t1 = std::chrono::steady_clock::now();
    out.elapsed_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return out;
}

}  // namespace

ParetoGridResult pareto(const Mdp& mdp, int s0, VarianceKind kind, const Rat& eps,
                        const std::string& witness_dir) {
    if (eps <= 0) throw ModelError("InvalidEps", format_rational(eps));
    ParetoGridResult grid;
    grid.kind = kind;
    grid.eps = eps;
    grid.radius = mdp.max_abs_reward();

    std::vector<std::pair<Rat, Rat>> coords;
    if (mdp.min_reward() == mdp.max_reward()) {
        // All rewards equal: the only achievable point.
        coords.push_back({mdp.min_reward(), Rat(0)});
    } else {
        const Rat R = grid.radius;
        for (Rat u = -R; u <= R; u += eps)
            for (Rat v = 0; v <= R * R; v += eps) coords.push_back({u, v});
    }

    grid.cells.resize(coords.size());
    const bool want_witness = !witness_dir.empty();

    int threads = pareto_threads();
    auto worker = [&](std::size_t lo, std::size_t hi) {
        GlobalChecker checker(mdp, s0);  // per-worker envelope cache
        for (std::size_t i = lo; i < hi; ++i) {
            const auto& [u, v] = coords[i];
            CellOutcome out = evaluate_cell(mdp, s0, kind, eps, u, v, &checker, want_witness);
            ParetoCell cell;
            cell.u = u;
            cell.v = v;
            cell.yes = out.yes;
            cell.elapsed_ms = out.elapsed_ms;
            if (out.yes && want_witness) {
                cell.witness_file = witness_dir + "/witness_" + to_string(kind) + "_" +
                                    std::to_string(i) + ".json";
                write_text_file(cell.witness_file, out.witness_json);
            }
            grid.cells[i] = std::move(cell);
        }
    };

    if (threads <= 1 || coords.size() < 2 * static_cast<std::size_t>(threads)) {
        worker(0, coords.size());
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (coords.size() + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            std::size_t lo = t * chunk, hi = std::min(coords.size(), lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    // Lower staircase: per u-column minimal Yes v, kept where strictly lower
    // than everything to the left. The result is mutually non-dominating.
    const Rat* best_v = nullptr;
    Rat current_u;
    bool have_u = false;
    auto flush = [&](const Rat& u, const Rat* v) {
        if (!v) return;
        if (!grid.staircase.empty() && grid.staircase.back().second <= *v) return;
        grid.staircase.push_back({u, *v});
    };
    for (const auto& cell : grid.cells) {
        if (!have_u || cell.u != current_u) {
            if (have_u) flush(current_u, best_v);
            current_u = cell.u;
            best_v = nullptr;
            have_u = true;
        }
        if (cell.yes && (!best_v || cell.v < *best_v)) best_v = &cell.v;
    }
    if (have_u) flush(current_u, best_v);
    return grid;
}

std::string pareto_to_csv(const ParetoGridResult& grid) {
    std::ostringstream os;
    os << "kind,u,v,answer,witness_file,elapsed_ms\n";
    for (const auto& cell : grid.cells)
        os << to_string(grid.kind) << "," << format_rational(cell.u) << ","
           << format_rational(cell.v) << "," << (cell.yes ? "Yes" : "No") << ","
           << cell.witness_file << "," << cell.elapsed_ms << "\n";
    return os.str();
}

std::string pareto_to_json(const ParetoGridResult& grid) {
    json j;
    j["kind"] = to_string(grid.kind);
    j["eps"] = format_rational(grid.eps);
    j["radius"] = format_rational(grid.radius);
    j["cells"] = json::array();
    for (const auto& cell : grid.cells) {
        json c;
        c["u"] = format_rational(cell.u);
        c["v"] = format_rational(cell.v);
        c["answer"] = cell.yes ? "Yes" : "No";
        c["witness_file"] = cell.witness_file;
        c["elapsed_ms"] = cell.elapsed_ms;
        j["cells"].push_back(c);
    }
    j["staircase"] = json::array();
    for (const auto& [u, v] : grid.staircase)
        j["staircase"].push_back({format_rational(u), format_rational(v)});
    return j.dump(2);
}

std::vector<ParetoRow> pareto_rows_from_csv(const std::string& text) {
    std::vector<ParetoRow> rows;
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() < 4) throw std::runtime_error("malformed pareto CSV row: " + line);
        rows.push_back(ParetoRow{fields[0], *parse_rational(fields[1]), *parse_rational(fields[2]),
                                 fields[3] == "Yes"});
    }
    return rows;
}

std::vector<ParetoRow> pareto_rows_from_json(const std::string& text) {
    std::vector<ParetoRow> rows;
    json j = json::parse(text);
    for (const auto& c : j.at("cells"))
        rows.push_back(ParetoRow{j.at("kind").get<std::string>(),
                                 *parse_rational(c.at("u").get<std::string>()),
                                 *parse_rational(c.at("v").get<std::string>()),
                                 c.at("answer").get<std::string>() == "Yes"});
    return rows;
}

}  // namespace mdpstab
