#include "evu/harness/trajectory.hpp"

#include <fstream>
#include <json.hpp>

#include "evu/errors.hpp"

namespace evu::harness {

using nlohmann::json;

std::string_view to_string(TerminatedBy t) {
    switch (t) {
        case TerminatedBy::Goal: return "goal";
        case TerminatedBy::Horizon: return "horizon";
        case TerminatedBy::Error: return "error";
    }
    return "?";
}

std::optional<TerminatedBy> terminated_by_from_string(std::string_view s) {
    if (s == "goal") return TerminatedBy::Goal;
    if (s == "horizon") return TerminatedBy::Horizon;
    if (s == "error") return TerminatedBy::Error;
    return std::nullopt;
}

std::int64_t Trajectory::total_input_tokens() const {
    std::int64_t n = 0;
    for (const agent::TurnRecord& t : turns) n += t.usage.input_tokens;
    return n;
}

std::int64_t Trajectory::total_output_tokens() const {
    std::int64_t n = 0;
    for (const agent::TurnRecord& t : turns) n += t.usage.output_tokens;
    return n;
}

double Trajectory::total_latency_ms() const {
    double n = 0;
    for (const agent::TurnRecord& t : turns) n += t.latency_ms;
    return n;
}

namespace {

json observation_to_json(const minihouse::Observation& obs) {
    json revealed = json::array();
    for (const minihouse::Literal& lit : obs.revealed) revealed.push_back(lit.canonical());
    return {{"text", obs.text}, {"revealed", revealed}, {"valid", obs.valid}};
}

minihouse::Observation observation_from_json(const json& j) {
    minihouse::Observation obs;
    obs.text = j.at("text").get<std::string>();
    obs.valid = j.at("valid").get<bool>();
    for (const json& jl : j.at("revealed")) {
        auto lit = minihouse::Literal::parse(jl.get<std::string>());
        if (!lit) throw Error("bad literal in trajectory file: " + jl.get<std::string>());
        obs.revealed.push_back(*lit);
    }
    return obs;
}

json turn_to_json(const agent::TurnRecord& t) {
    json j;
    j["turn"] = t.turn;
    j["observation"] = observation_to_json(t.observation);
    j["estimate"] = t.estimate ? json(*t.estimate) : json(nullptr);
    j["verification"] = t.verification ? json(*t.verification) : json(nullptr);
    if (t.belief)
        j["belief"] = {{"text", t.belief->text}, {"turn", t.belief->turn}};
    else
        j["belief"] = nullptr;
    j["thought"] = t.thought ? json(*t.thought) : json(nullptr);
    j["reflections"] = t.reflections;
    j["action_text"] = t.action_text;
    j["action"] = t.action ? json(minihouse::render_action(*t.action)) : json(nullptr);
    j["valid"] = t.valid;
    j["usage"] = {{"input_tokens", t.usage.input_tokens},
                  {"output_tokens", t.usage.output_tokens}};
    j["latency_ms"] = t.latency_ms;
    return j;
}

agent::TurnRecord turn_from_json(const json& j) {
    agent::TurnRecord t;
    t.turn = j.at("turn").get<int>();
    t.observation = observation_from_json(j.at("observation"));
    if (!j.at("estimate").is_null()) t.estimate = j.at("estimate").get<std::string>();
    if (!j.at("verification").is_null()) t.verification = j.at("verification").get<std::string>();
    if (!j.at("belief").is_null())
        t.belief = agent::make_belief(j.at("belief").at("text").get<std::string>(),
                                      j.at("belief").at("turn").get<int>());
    if (!j.at("thought").is_null()) t.thought = j.at("thought").get<std::string>();
    t.reflections = j.at("reflections").get<std::vector<std::string>>();
    t.action_text = j.at("action_text").get<std::string>();
    if (!j.at("action").is_null()) {
        t.action = minihouse::parse_action(j.at("action").get<std::string>());
        if (!t.action) throw Error("bad action in trajectory file");
    }
    t.valid = j.at("valid").get<bool>();
    t.usage.input_tokens = j.at("usage").at("input_tokens").get<std::int64_t>();
    t.usage.output_tokens = j.at("usage").at("output_tokens").get<std::int64_t>();
    t.latency_ms = j.at("latency_ms").get<double>();
    return t;
}

json strategy_to_json(const agent::Strategy& s) {
    return {{"kind", std::string(agent::to_string(s.kind))},
            {"evu_mode", std::string(agent::to_string(s.evu_mode))},
            {"reflection_rounds", s.reflection_rounds}};
}

agent::Strategy strategy_from_json(const json& j) {
    agent::Strategy s;
    auto kind = agent::strategy_kind_from_string(j.at("kind").get<std::string>());
    auto mode = agent::evu_mode_from_string(j.at("evu_mode").get<std::string>());
    if (!kind || !mode) throw Error("bad strategy in trajectory file");
    s.kind = *kind;
    s.evu_mode = *mode;
    s.reflection_rounds = j.at("reflection_rounds").get<int>();
    return s;
}

json task_to_json(const minihouse::TaskSpec& t) {
    json goal = json::array();
    for (const minihouse::Literal& lit : t.goal) goal.push_back(lit.canonical());
    json plan = json::array();
    for (const minihouse::ActionCommand& a : t.reference_plan)
        plan.push_back(minihouse::render_action(a));
    return {{"instruction", t.instruction},
            {"goal", goal},
            {"subgoal_count", t.subgoal_count},
            {"difficulty", std::string(minihouse::to_string(t.difficulty))},
            {"family", std::string(minihouse::to_string(t.family))},
            {"reference_plan", plan}};
}

minihouse::TaskSpec task_from_json(const json& j) {
    minihouse::TaskSpec t;
    t.instruction = j.at("instruction").get<std::string>();
    for (const json& jl : j.at("goal")) {
        auto lit = minihouse::Literal::parse(jl.get<std::string>());
        if (!lit) throw Error("bad goal literal in trajectory file");
        t.goal.push_back(*lit);
    }
    t.subgoal_count = j.at("subgoal_count").get<int>();
    auto diff = minihouse::difficulty_from_string(j.at("difficulty").get<std::string>());
    auto fam = minihouse::task_family_from_string(j.at("family").get<std::string>());
    if (!diff || !fam) throw Error("bad difficulty/family in trajectory file");
    t.difficulty = *diff;
    t.family = *fam;
    for (const json& ja : j.at("reference_plan")) {
        auto a = minihouse::parse_action(ja.get<std::string>());
        if (!a) throw Error("bad plan action in trajectory file");
        t.reference_plan.push_back(*a);
    }
    return t;
}

}  // namespace

std::string trajectory_to_jsonl(const Trajectory& traj) {
    std::string out;
    json header = {{"schema", "evu_trajectory"},
                   {"version", 1},
                   {"task", task_to_json(traj.task)},
                   {"seed", traj.seed},
                   {"strategy", strategy_to_json(traj.strategy)},
                   {"horizon", traj.horizon},
                   {"reward", traj.reward},
                   {"terminated_by", std::string(to_string(traj.terminated_by))},
                   {"backend", traj.backend_label}};
    out += header.dump() + "\n";
    for (const agent::TurnRecord& t : traj.turns) out += turn_to_json(t).dump() + "\n";
    json trailer = {{"final_observation", observation_to_json(traj.final_observation)}};
    out += trailer.dump() + "\n";
    return out;
}

Trajectory trajectory_from_jsonl(const std::string& text) {
    Trajectory traj;
    size_t start = 0;
    int line_no = 0;
    bool saw_trailer = false;
    while (start < text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(start, end - start);
        start = end + 1;
        if (line.empty()) continue;
        json j = json::parse(line);
        if (line_no == 0) {
            if (j.value("schema", "") != "evu_trajectory")
                throw Error("not a trajectory file");
            if (j.value("version", 0) != 1) throw Error("unsupported trajectory version");
            traj.task = task_from_json(j.at("task"));
            traj.seed = j.at("seed").get<std::uint64_t>();
            traj.strategy = strategy_from_json(j.at("strategy"));
            traj.horizon = j.at("horizon").get<int>();
            traj.reward = j.at("reward").get<int>();
            auto tb = terminated_by_from_string(j.at("terminated_by").get<std::string>());
            if (!tb) throw Error("bad terminated_by in trajectory file");
            traj.terminated_by = *tb;
            traj.backend_label = j.at("backend").get<std::string>();
        } else if (j.contains("final_observation")) {
            traj.final_observation = observation_from_json(j.at("final_observation"));
            saw_trailer = true;
        } else {
            traj.turns.push_back(turn_from_json(j));
        }
        ++line_no;
    }
    if (line_no == 0) throw Error("empty trajectory file");
    if (!saw_trailer) throw Error("trajectory file has no trailer record");
    return traj;
}

void save_trajectory(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write trajectory file: " + path);
    out << trajectory_to_jsonl(traj);
}

Trajectory load_trajectory(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("cannot read trajectory file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return trajectory_from_jsonl(text);
}

minihouse::WorldState replay_world_state(const Trajectory& traj, int through_turn) {
    if (through_turn < 0 || through_turn > static_cast<int>(traj.turns.size()))
        throw ContractError("replay_world_state: turn out of range");
    minihouse::ResetOptions opts;
    opts.seed = traj.seed;
    opts.family = traj.task.family;
    opts.difficulty = traj.task.difficulty;
    opts.horizon = traj.horizon;
    minihouse::Environment env = minihouse::reset(opts);
    if (env.task() != traj.task)
        throw ContractError("replay_world_state: regenerated task differs from the recorded one");
    for (int i = 0; i < through_turn; ++i) {
        const agent::TurnRecord& rec = traj.turns[i];
        if (!rec.action) continue;  // unparseable actions never reached the environment
        if (env.done()) break;
        env.step(*rec.action);
    }
    return env.state();
}

}  // namespace evu::harness
