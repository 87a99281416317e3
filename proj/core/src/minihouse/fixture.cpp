#include "evu/minihouse/fixture.hpp"

#include <fstream>
#include <json.hpp>

#include "evu/errors.hpp"

namespace evu::minihouse {

namespace {

using nlohmann::json;

json literal_to_json(const Literal& l) { return l.canonical(); }

Literal literal_from_json(const json& j) {
    auto lit = Literal::parse(j.get<std::string>());
    if (!lit) throw SchemaError("bad literal in fixture: " + j.get<std::string>());
    return *lit;
}

json action_to_json(const ActionCommand& a) { return render_action(a); }

ActionCommand action_from_json(const json& j) {
    auto a = parse_action(j.get<std::string>());
    if (!a) throw SchemaError("bad action in fixture: " + j.get<std::string>());
    return *a;
}

}  // namespace

std::string fixture_to_json(const WorldFixture& f) {
    json j;
    j["schema"] = "minihouse_fixture";
    j["version"] = 1;
    j["horizon"] = f.horizon;

    json objects = json::object();
    for (const auto& [id, o] : f.world.objects) {
        objects[id] = {{"kind", o.kind},     {"location", o.location}, {"clean", o.clean},
                       {"hot", o.hot},       {"cold", o.cold},         {"toggled", o.toggled}};
    }
    json receps = json::object();
    for (const auto& [id, r] : f.world.receptacles) {
        receps[id] = {{"kind", r.kind}, {"openable", r.openable}, {"open", r.open}};
    }
    j["world"] = {{"objects", objects},
                  {"receptacles", receps},
                  {"agent_at", f.world.agent_at},
                  {"rng_seed", f.world.rng_seed},
                  {"step_count", f.world.step_count}};

    json goal = json::array();
    for (const Literal& lit : f.task.goal) goal.push_back(literal_to_json(lit));
    json plan = json::array();
    for (const ActionCommand& a : f.task.reference_plan) plan.push_back(action_to_json(a));
    j["task"] = {{"instruction", f.task.instruction},
                 {"goal", goal},
                 {"subgoal_count", f.task.subgoal_count},
                 {"difficulty", std::string(to_string(f.task.difficulty))},
                 {"family", std::string(to_string(f.task.family))},
                 {"reference_plan", plan}};
    return j.dump(2) + "\n";
}

WorldFixture fixture_from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.value("schema", "") != "minihouse_fixture")
        throw SchemaError("not a minihouse fixture file");
    if (j.value("version", 0) != 1)
        throw SchemaError("unsupported fixture version");

    WorldFixture f;
    f.horizon = j.at("horizon").get<int>();

    const json& w = j.at("world");
    for (auto& [id, jo] : w.at("objects").items()) {
        ObjectState o;
        o.kind = jo.at("kind").get<std::string>();
        o.location = jo.at("location").get<std::string>();
        o.clean = jo.at("clean").get<bool>();
        o.hot = jo.at("hot").get<bool>();
        o.cold = jo.at("cold").get<bool>();
        o.toggled = jo.at("toggled").get<bool>();
        f.world.objects[id] = o;
    }
    for (auto& [id, jr] : w.at("receptacles").items()) {
        ReceptacleState r;
        r.kind = jr.at("kind").get<std::string>();
        r.openable = jr.at("openable").get<bool>();
        r.open = jr.at("open").get<bool>();
        f.world.receptacles[id] = r;
    }
    f.world.agent_at = w.at("agent_at").get<std::string>();
    f.world.rng_seed = w.at("rng_seed").get<std::uint64_t>();
    f.world.step_count = w.at("step_count").get<int>();

    const json& t = j.at("task");
    f.task.instruction = t.at("instruction").get<std::string>();
    for (const json& jl : t.at("goal")) f.task.goal.push_back(literal_from_json(jl));
    f.task.subgoal_count = t.at("subgoal_count").get<int>();
    auto diff = difficulty_from_string(t.at("difficulty").get<std::string>());
    auto fam = task_family_from_string(t.at("family").get<std::string>());
    if (!diff || !fam) throw SchemaError("bad difficulty/family in fixture");
    f.task.difficulty = *diff;
    f.task.family = *fam;
    for (const json& ja : t.at("reference_plan"))
        f.task.reference_plan.push_back(action_from_json(ja));
    return f;
}

void save_fixture(const WorldFixture& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write fixture file: " + path);
    out << fixture_to_json(f);
}

WorldFixture load_fixture(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("cannot read fixture file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return fixture_from_json(text);
}

}  // namespace evu::minihouse
