#include "mdpstab/cli.hpp"

#include "mdpstab/global.hpp"
#include "mdpstab/hybrid.hpp"
#include "mdpstab/io.hpp"
#include "mdpstab/local.hpp"
#include "mdpstab/pareto.hpp"
#include "mdpstab/sim.hpp"
#include "mdpstab/zerovar.hpp"

#include <CLI11.hpp>
#include <json.hpp>

namespace mdpstab {

using nlohmann::json;

namespace {

struct CliError : std::runtime_error {
    int code;
    CliError(int c, const std::string& what) : std::runtime_error(what), code(c) {}
};

std::pair<Rat, Rat> parse_point(const std::string& text) {
    auto comma = text.find(',');
    if (comma == std::string::npos) throw CliError(2, "--point expects u,v");
    auto u = parse_rational(text.substr(0, comma));
    auto v = parse_rational(text.substr(comma + 1));
    if (!u || !v) throw CliError(2, "--point expects rational u,v");
    return {*u, *v};
}

int state_or_initial(const Mdp& mdp, const std::string& name) {
    if (name.empty()) return mdp.initial_state();
    int s = mdp.state_index(name);
    if (s < 0) throw ModelError("UnknownTarget", "state " + name);
    return s;
}

VarianceKind kind_of(const std::string& name) {
    if (name == "global") return VarianceKind::Global;
    if (name == "local") return VarianceKind::Local;
    if (name == "hybrid") return VarianceKind::Hybrid;
    throw CliError(2, "unknown variance kind " + name);
}

json strategy_json(const Mdp& mdp, const StochasticUpdateStrategy& st) {
    return json::parse(strategy_to_json_text(mdp, st));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mean-payoff / variance trade-off solver for finite MDPs"};
    app.require_subcommand(1);

    std::string mdp_path, from, point, strategy_path, out_path, csv_path, json_path, witness_dir;
    std::string eps_text = "1/100";
    bool as_json = false, all_states = false;
    long runs = 10000, horizon = 1000, burn_in = -1;
    unsigned long long pair_budget = 0;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* cmd, bool needs_from = true) {
        cmd->add_option("--mdp", mdp_path, "MDP model file (JSON)")->required();
        if (needs_from) cmd->add_option("--from", from, "start state (default: model initial)");
        cmd->add_flag("--json", as_json, "machine-readable output");
    };

    auto* mec_cmd = app.add_subcommand("mec", "MEC decomposition with payoff intervals");
    add_common(mec_cmd, false);

    auto* check_cmd = app.add_subcommand("check", "decide achievability of a point");
    check_cmd->require_subcommand(1);
    std::vector<CLI::App*> check_kinds;
    for (const char* kind : {"global", "local", "hybrid"}) {
        auto* c = check_cmd->add_subcommand(kind);
        add_common(c);
        c->add_option("--point", point, "target point u,v")->required();
        if (std::string(kind) != "local")
            c->add_option("--eps", eps_text, "approximation precision (default 1/100)");
        else
            c->add_option("--pair-budget", pair_budget, "cap on strategy pairs");
        c->add_option("--witness-out", out_path, "write the witness strategy (JSON)");
        check_kinds.push_back(c);
    }

    auto* zero_cmd = app.add_subcommand("zero-var", "minimal expectation with zero variance");
    zero_cmd->require_subcommand(1);
    for (const char* kind : {"global", "local", "hybrid"}) {
        auto* c = zero_cmd->add_subcommand(kind);
        add_common(c);
        c->add_flag("--all-states", all_states, "tabulate every state");
        c->add_option("--witness-out", out_path, "write the witness strategy (JSON)");
    }

    auto* pareto_cmd = app.add_subcommand("pareto", "approximate the Pareto curve on a grid");
    pareto_cmd->require_subcommand(1);
    for (const char* kind : {"global", "local", "hybrid"}) {
        auto* c = pareto_cmd->add_subcommand(kind);
        add_common(c);
        c->add_option("--eps", eps_text, "grid resolution")->required();
        c->add_option("--csv", csv_path, "write the grid as CSV");
        c->add_option("--json-out", json_path, "write the grid as JSON");
        c->add_option("--witness-dir", witness_dir, "directory for per-cell witnesses");
    }

    auto* synth_cmd = app.add_subcommand("synthesize", "synthesize a witness strategy");
    synth_cmd->require_subcommand(1);
    for (const char* kind : {"global", "local", "hybrid"}) {
        auto* c = synth_cmd->add_subcommand(kind);
        add_common(c);
        c->add_option("--point", point, "target point u,v")->required();
        if (std::string(kind) != "local")
            c->add_option("--eps", eps_text, "approximation precision (default 1/100)");
        else
            c->add_option("--pair-budget", pair_budget, "cap on strategy pairs");
        c->add_option("--out", out_path, "output strategy file")->required();
    }

    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimates for a strategy");
    add_common(sim_cmd);
    sim_cmd->add_option("--strategy", strategy_path, "strategy file (JSON)")->required();
    sim_cmd->add_option("--runs", runs, "number of runs");
    sim_cmd->add_option("--horizon", horizon, "steps per run");
    sim_cmd->add_option("--seed", seed, "RNG seed");
    sim_cmd->add_option("--burn-in", burn_in, "discarded prefix steps (default horizon/10)");

    auto* rel_cmd = app.add_subcommand("relation",
                                       "hybrid = global + local identity for a strategy");
    add_common(rel_cmd);
    rel_cmd->add_option("--strategy", strategy_path, "strategy file (JSON)")->required();
    rel_cmd->add_option("--runs", runs, "number of runs");
    rel_cmd->add_option("--horizon", horizon, "steps per run");
    rel_cmd->add_option("--seed", seed, "RNG seed");

    try {
        std::vector<std::string> argv = args;
        std::reverse(argv.begin(), argv.end());
        app.parse(argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        Mdp mdp = load_mdp(mdp_path);

        if (mec_cmd->parsed()) {
            auto mecs = mec_decomposition(mdp);
            json j = json::array();
            for (const auto& mec : mecs) {
                auto bounds = mec_payoff_bounds(mdp, mec);
                json m;
                for (int s : mec.states) m["states"].push_back(mdp.state_name(s));
                for (int a : mec.actions) m["actions"].push_back(mdp.action(a).id);
                m["alpha"] = format_rational(bounds.alpha);
                m["beta"] = format_rational(bounds.beta);
                j.push_back(m);
                if (!as_json) {
                    out << "MEC {";
                    for (int s : mec.states) out << " " << mdp.state_name(s);
                    out << " } actions {";
                    for (int a : mec.actions) out << " " << mdp.action(a).id;
                    out << " } payoff [" << format_rational(bounds.alpha) << ", "
                        << format_rational(bounds.beta) << "]\n";
                }
            }
            if (as_json) out << j.dump(2) << "\n";
            return 0;
        }

        if (check_cmd->parsed() || synth_cmd->parsed()) {
            CLI::App* parent = check_cmd->parsed() ? check_cmd : synth_cmd;
            std::string kind_name = parent->get_subcommands().front()->get_name();
            VarianceKind kind = kind_of(kind_name);
            int s0 = state_or_initial(mdp, from);
            auto [u, v] = parse_point(point);
            auto eps = parse_rational(eps_text);
            if (!eps || *eps <= 0) throw CliError(2, "--eps must be a positive rational");

            bool yes = false;
            json j;
            std::string witness_text;
            if (kind == VarianceKind::Global) {
                auto res = approx_check_global(mdp, s0, u, v, *eps);
                yes = res.yes;
                j["answer"] = yes ? "Yes" : "No";
                if (yes) {
                    j["z_bar"] = format_rational(res.witness->z_bar);
                    j["mean"] = format_rational(res.witness->mean);
                    j["variance"] = format_rational(res.witness->variance);
                    j["witness"] = strategy_json(mdp, res.witness->strategy);
                    witness_text = strategy_to_json_text(mdp, res.witness->strategy);
                }
            } else if (kind == VarianceKind::Hybrid) {
                auto res = approx_check_hybrid(mdp, s0, u, v, *eps);
                yes = res.yes;
                j["answer"] = yes ? "Yes" : "No";
                if (yes) {
                    j["mu"] = format_rational(res.witness->mu);
                    j["mean"] = format_rational(res.witness->mean);
                    j["hybrid_variance"] = format_rational(res.witness->hybrid_variance);
                    j["witness"] = strategy_json(mdp, res.witness->strategy);
                    witness_text = strategy_to_json_text(mdp, res.witness->strategy);
                }
            } else {
                std::optional<unsigned long long> budget;
                if (pair_budget > 0) budget = pair_budget;
                auto res = check_local(mdp, s0, u, v, budget);
                if (res.answer == LocalAnswer::BudgetExceeded) {
                    err << "pair budget exceeded without a feasible pair\n";
                    return 1;
                }
                yes = res.answer == LocalAnswer::Yes;
                j["answer"] = yes ? "Yes" : "No";
                if (yes) {
                    j["mean"] = format_rational(res.witness->mean);
                    j["local_variance"] = format_rational(res.witness->local_variance);
                    j["witness"] = strategy_json(mdp, res.witness->strategy);
                    witness_text = strategy_to_json_text(mdp, res.witness->strategy);
                }
            }
            if (!out_path.empty() && yes) write_text_file(out_path, witness_text);
            if (synth_cmd->parsed() && !yes) {
                err << "no witness: answer is No\n";
                return 1;
            }
            if (as_json)
                out << j.dump(2) << "\n";
            else
                out << (yes ? "Yes" : "No") << "\n";
            return yes ? 0 : 1;
        }

        if (zero_cmd->parsed()) {
            std::string kind_name = zero_cmd->get_subcommands().front()->get_name();
            VarianceKind kind = kind_of(kind_name);
            auto solve = [&](int s) {
                switch (kind) {
                    case VarianceKind::Global: return zero_global(mdp, s);
                    case VarianceKind::Local: return zero_local(mdp, s);
                    case VarianceKind::Hybrid: return zero_hybrid(mdp, s);
                }
                return ZeroVarAnswer{};
            };
            if (all_states) {
                json j = json::array();
                for (int s = 0; s < mdp.num_states(); ++s) {
                    auto ans = solve(s);
                    json row;
                    row["state"] = mdp.state_name(s);
                    row["value"] = ans.no() ? json(nullptr) : json(format_rational(*ans.value));
                    j.push_back(row);
                    if (!as_json)
                        out << mdp.state_name(s) << "\t"
                            << (ans.no() ? "NO" : format_rational(*ans.value)) << "\n";
                }
                if (as_json) out << j.dump(2) << "\n";
                return 0;
            }
            int s0 = state_or_initial(mdp, from);
            auto ans = solve(s0);
            if (as_json) {
                json j;
                j["state"] = mdp.state_name(s0);
                j["value"] = ans.no() ? json(nullptr) : json(format_rational(*ans.value));
                if (ans.witness) j["witness"] = strategy_json(mdp, *ans.witness);
                out << j.dump(2) << "\n";
            } else {
                out << (ans.no() ? "NO" : format_rational(*ans.value)) << "\n";
            }
            if (!ans.no() && !out_path.empty())
                write_text_file(out_path, strategy_to_json_text(mdp, *ans.witness));
            return ans.no() ? 1 : 0;
        }

        if (pareto_cmd->parsed()) {
            std::string kind_name = pareto_cmd->get_subcommands().front()->get_name();
            VarianceKind kind = kind_of(kind_name);
            int s0 = state_or_initial(mdp, from);
            auto eps = parse_rational(eps_text);
            if (!eps || *eps <= 0) throw CliError(2, "--eps must be a positive rational");
            auto grid = pareto(mdp, s0, kind, *eps, witness_dir);
            if (!csv_path.empty()) write_text_file(csv_path, pareto_to_csv(grid));
            if (!json_path.empty()) write_text_file(json_path, pareto_to_json(grid));
            if (as_json)
                out << pareto_to_json(grid) << "\n";
            else {
                out << "staircase:";
                for (const auto& [su, sv] : grid.staircase)
                    out << " (" << format_rational(su) << ", " << format_rational(sv) << ")";
                out << "\n";
            }
            return 0;
        }

        if (sim_cmd->parsed()) {
            int s0 = state_or_initial(mdp, from);
            auto strategy = load_strategy(mdp, strategy_path);
            SimConfig cfg;
            cfg.runs = runs;
            cfg.horizon = horizon;
            cfg.seed = seed;
            if (burn_in >= 0) cfg.burn_in = burn_in;
            auto stats = simulate(mdp, strategy, s0, cfg);
            json j;
            j["mean_payoff"] = stats.expected_mean_payoff;
            j["variance_of_mean_payoff"] = stats.variance_of_mean_payoff;
            j["local_variance"] = stats.expected_local_variance;
            j["hybrid_variance"] = stats.expected_hybrid_variance;
            j["se"] = {{"mean_payoff", stats.se_mean_payoff},
                       {"variance_of_mean_payoff", stats.se_variance},
                       {"local_variance", stats.se_local_variance},
                       {"hybrid_variance", stats.se_hybrid_variance}};
            if (as_json)
                out << j.dump(2) << "\n";
            else
                out << "E[mp] = " << stats.expected_mean_payoff
                    << "  Var[mp] = " << stats.variance_of_mean_payoff
                    << "  E[lv] = " << stats.expected_local_variance
                    << "  E[hv] = " << stats.expected_hybrid_variance << "\n";
            return 0;
        }

        if (rel_cmd->parsed()) {
            int s0 = state_or_initial(mdp, from);
            auto strategy = load_strategy(mdp, strategy_path);
            SimConfig cfg;
            cfg.runs = runs;
            cfg.horizon = horizon;
            cfg.seed = seed;
            auto rep = check_relation(mdp, strategy, s0, cfg);
            json j;
            j["exact"] = {{"hybrid", format_rational(rep.exact_hybrid)},
                          {"variance_of_mean_payoff", format_rational(rep.exact_var_mp)},
                          {"local", format_rational(rep.exact_local)},
                          {"identity_holds", rep.exact_equal}};
            j["monte_carlo"] = {{"hybrid", rep.mc_hybrid},
                                {"variance_of_mean_payoff", rep.mc_var_mp},
                                {"local", rep.mc_local},
                                {"agree", rep.mc_agree}};
            if (as_json)
                out << j.dump(2) << "\n";
            else
                out << "exact: hv = " << format_rational(rep.exact_hybrid)
                    << ", var + lv = " << format_rational(rep.exact_var_mp + rep.exact_local)
                    << (rep.exact_equal ? " (equal)" : " (MISMATCH)") << "\n"
                    << "monte carlo: hv = " << rep.mc_hybrid
                    << ", var + lv = " << rep.mc_var_mp + rep.mc_local
                    << (rep.mc_agree ? " (within 3 se)" : " (outside 3 se)") << "\n";
            return 0;
        }
    } catch (const CliError& e) {
        err << e.what() << "\n";
        return e.code;
    } catch (const ModelError& e) {
        err << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 3;
    }
    return 2;
}

}  // namespace mdpstab
