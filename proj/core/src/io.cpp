#include "mdpstab/io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace mdpstab {

using nlohmann::json;

namespace {

Rat rat_from_json(const json& j, const std::string& what) {
    std::string text;
    if (j.is_string())
        text = j.get<std::string>();
    else if (j.is_number_integer())
        text = std::to_string(j.get<long long>());
    else if (j.is_number_float()) {
        std::ostringstream os;
        os.precision(17);
        os << j.get<double>();
        text = os.str();
    } else
        throw ModelError("BadDistribution", what + " is not a number");
    auto r = parse_rational(text);
    if (!r) throw ModelError("BadDistribution", what + " is not rational: " + text);
    return *r;
}

json parse_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ModelError("BadDistribution", "malformed JSON");
    return j;
}

}  // namespace

Mdp mdp_from_json_text(const std::string& text) {
    json j = parse_json(text);
    RawMdp raw;
    if (!j.contains("states") || !j.contains("initial") || !j.contains("actions"))
        throw ModelError("BadDistribution", "missing states/initial/actions");
    for (const auto& s : j["states"]) raw.states.push_back(s.get<std::string>());
    raw.initial = j["initial"].get<std::string>();
    for (const auto& ja : j["actions"]) {
        RawAction a;
        a.id = ja.at("id").get<std::string>();
        a.source = ja.at("source").get<std::string>();
        a.reward = rat_from_json(ja.at("reward"), "reward of " + a.id);
        for (const auto& [target, p] : ja.at("transitions").items())
            a.transitions.push_back({target, rat_from_json(p, "transition of " + a.id)});
        raw.actions.push_back(std::move(a));
    }
    return validate_mdp(raw);
}

Mdp load_mdp(const std::string& path) { return mdp_from_json_text(read_text_file(path)); }

std::string mdp_to_json_text(const Mdp& mdp) {
    json j;
    for (int s = 0; s < mdp.num_states(); ++s) j["states"].push_back(mdp.state_name(s));
    j["initial"] = mdp.state_name(mdp.initial_state());
    j["actions"] = json::array();
    for (int a = 0; a < mdp.num_actions(); ++a) {
        const auto& act = mdp.action(a);
        json ja;
        ja["id"] = act.id;
        ja["source"] = mdp.state_name(act.source);
        ja["reward"] = format_rational(act.reward);
        for (const auto& [t, p] : act.transitions)
            ja["transitions"][mdp.state_name(t)] = format_rational(p);
        j["actions"].push_back(ja);
    }
    return j.dump(2);
}

StochasticUpdateStrategy strategy_from_json_text(const Mdp& mdp, const std::string& text) {
    json j = parse_json(text);
    StochasticUpdateStrategy st;
    if (j.contains("memory"))
        for (const auto& m : j["memory"]) st.memory.push_back(m.get<std::string>());
    if (st.memory.empty()) st.memory = {"m"};
    const int M = st.memory_size();
    auto memory_index = [&](const std::string& name) {
        for (int m = 0; m < M; ++m)
            if (st.memory[m] == name) return m;
        throw ModelError("BadStrategy", "unknown memory element " + name);
    };

    if (j.contains("initial_memory"))
        for (const auto& [m, p] : j["initial_memory"].items())
            st.initial_memory.push_back({memory_index(m), rat_from_json(p, "initial_memory")});
    else
        st.initial_memory = {{0, Rat(1)}};

    st.next_move.assign(mdp.num_states(), std::vector<Dist>(M));
    for (int s = 0; s < mdp.num_states(); ++s)
        for (int m = 0; m < M; ++m)
            st.next_move[s][m] = {{mdp.enabled(s).front(), Rat(1)}};
    if (j.contains("next_move"))
        for (const auto& entry : j["next_move"]) {
            int s = mdp.state_index(entry.at("state").get<std::string>());
            if (s < 0) throw ModelError("BadStrategy", "unknown state in next_move");
            int m = memory_index(entry.at("memory").get<std::string>());
            Dist d;
            for (const auto& [aid, p] : entry.at("distribution").items()) {
                int a = mdp.action_index(aid);
                if (a < 0) throw ModelError("BadStrategy", "unknown action " + aid);
                d.push_back({a, rat_from_json(p, "next_move")});
            }
            st.next_move[s][m] = std::move(d);
        }

    st.memory_update.assign(
        mdp.num_actions(),
        std::vector<std::vector<Dist>>(mdp.num_states(), std::vector<Dist>(M)));
    for (int a = 0; a < mdp.num_actions(); ++a)
        for (int t = 0; t < mdp.num_states(); ++t)
            for (int m = 0; m < M; ++m) st.memory_update[a][t][m] = {{m, Rat(1)}};
    if (j.contains("memory_update"))
        for (const auto& entry : j["memory_update"]) {
            int a = mdp.action_index(entry.at("action").get<std::string>());
            if (a < 0) throw ModelError("BadStrategy", "unknown action in memory_update");
            int t = mdp.state_index(entry.at("state").get<std::string>());
            if (t < 0) throw ModelError("BadStrategy", "unknown state in memory_update");
            int m = memory_index(entry.at("memory").get<std::string>());
            Dist d;
            for (const auto& [m2, p] : entry.at("distribution").items())
                d.push_back({memory_index(m2), rat_from_json(p, "memory_update")});
            st.memory_update[a][t][m] = std::move(d);
        }

    validate_strategy(mdp, st);
    return st;
}

StochasticUpdateStrategy load_strategy(const Mdp& mdp, const std::string& path) {
    return strategy_from_json_text(mdp, read_text_file(path));
}

std::string strategy_to_json_text(const Mdp& mdp, const StochasticUpdateStrategy& st) {
    json j;
    for (const auto& m : st.memory) j["memory"].push_back(m);
    for (const auto& [m, p] : st.initial_memory)
        j["initial_memory"][st.memory[m]] = format_rational(p);
    j["next_move"] = json::array();
    for (int s = 0; s < mdp.num_states(); ++s)
        for (int m = 0; m < st.memory_size(); ++m) {
            json entry;
            entry["state"] = mdp.state_name(s);
            entry["memory"] = st.memory[m];
            for (const auto& [a, p] : st.next_move[s][m])
                entry["distribution"][mdp.action(a).id] = format_rational(p);
            j["next_move"].push_back(entry);
        }
    j["memory_update"] = json::array();
    for (int a = 0; a < mdp.num_actions(); ++a)
        for (int t = 0; t < mdp.num_states(); ++t)
            for (int m = 0; m < st.memory_size(); ++m) {
                const Dist& d = st.memory_update[a][t][m];
                if (d.size() == 1 && d[0].first == m) continue;  // identity default
                json entry;
                entry["action"] = mdp.action(a).id;
                entry["state"] = mdp.state_name(t);
                entry["memory"] = st.memory[m];
                for (const auto& [m2, p] : d)
                    entry["distribution"][st.memory[m2]] = format_rational(p);
                j["memory_update"].push_back(entry);
            }
    return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace mdpstab
