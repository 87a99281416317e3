#include "evu/minihouse/task.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "evu/errors.hpp"
#include "evu/minihouse/world.hpp"

namespace evu::minihouse {

namespace {

std::string_view trim_view(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// splitmix64, used to derive independent attempt seeds from one base seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::string_view to_string(TaskFamily f) {
    switch (f) {
        case TaskFamily::PickPlace: return "pick_place";
        case TaskFamily::PickCleanPlace: return "pick_clean_place";
        case TaskFamily::PickHeatPlace: return "pick_heat_place";
        case TaskFamily::PickCoolPlace: return "pick_cool_place";
        case TaskFamily::PickTwo: return "pick_two";
        case TaskFamily::LookInLight: return "look_in_light";
    }
    return "?";
}

std::string_view to_string(Difficulty d) {
    switch (d) {
        case Difficulty::Easy: return "easy";
        case Difficulty::Medium: return "medium";
        case Difficulty::Hard: return "hard";
        case Difficulty::VeryHard: return "very_hard";
    }
    return "?";
}

std::optional<TaskFamily> task_family_from_string(std::string_view s) {
    if (s == "pick_place") return TaskFamily::PickPlace;
    if (s == "pick_clean_place") return TaskFamily::PickCleanPlace;
    if (s == "pick_heat_place") return TaskFamily::PickHeatPlace;
    if (s == "pick_cool_place") return TaskFamily::PickCoolPlace;
    if (s == "pick_two") return TaskFamily::PickTwo;
    if (s == "look_in_light") return TaskFamily::LookInLight;
    return std::nullopt;
}

std::optional<Difficulty> difficulty_from_string(std::string_view s) {
    if (s == "easy") return Difficulty::Easy;
    if (s == "medium") return Difficulty::Medium;
    if (s == "hard") return Difficulty::Hard;
    if (s == "very_hard" || s == "veryhard") return Difficulty::VeryHard;
    return std::nullopt;
}

Difficulty difficulty_for_subgoals(int subgoal_count) {
    if (subgoal_count <= 4) return Difficulty::Easy;
    if (subgoal_count <= 8) return Difficulty::Medium;
    if (subgoal_count <= 12) return Difficulty::Hard;
    return Difficulty::VeryHard;
}

std::pair<int, int> subgoal_range(Difficulty d) {
    switch (d) {
        case Difficulty::Easy: return {0, 4};
        case Difficulty::Medium: return {5, 8};
        case Difficulty::Hard: return {9, 12};
        case Difficulty::VeryHard: return {13, 16};
    }
    return {0, 4};
}

std::string render_instruction(const std::vector<Literal>& goal) {
    std::string out;
    for (const Literal& lit : goal) {
        if (!out.empty()) out += " and ";
        const Variable& v = lit.var;
        switch (v.kind) {
            case VarKind::In:
                out += "put the " + v.object + " in the " + v.recep;
                break;
            case VarKind::On:
                out += "put the " + v.object + " on the " + v.recep;
                break;
            case VarKind::Holding:
                out += "pick up the " + v.object;
                break;
            case VarKind::Attribute:
                if (v.attr == Attr::Toggled) {
                    out += "turn on the " + v.object;
                } else {
                    out += "make the " + v.object + " " + std::string(to_string(v.attr));
                }
                break;
            default:
                break;
        }
    }
    return out;
}

std::vector<Literal> parse_instruction(std::string_view instruction) {
    std::vector<Literal> out;
    std::string text(trim_view(instruction));
    if (!text.empty() && text.back() == '.') text.pop_back();

    size_t start = 0;
    while (start <= text.size()) {
        size_t next = text.find(" and ", start);
        std::string phrase(trim_view(std::string_view(text).substr(
            start, next == std::string::npos ? std::string::npos : next - start)));
        start = next == std::string::npos ? text.size() + 1 : next + 5;
        if (phrase.empty()) continue;

        if (phrase.rfind("put the ", 0) == 0) {
            std::string_view rest = std::string_view(phrase).substr(8);
            size_t prep_pos;
            std::string_view prep_used;
            for (std::string_view prep : {" in/on the ", " in the ", " on the "}) {
                prep_pos = rest.find(prep);
                if (prep_pos != std::string_view::npos) { prep_used = prep; break; }
            }
            if (prep_used.empty()) return {};
            std::string obj(trim_view(rest.substr(0, prep_pos)));
            std::string recep(trim_view(rest.substr(prep_pos + prep_used.size())));
            if (obj.empty() || recep.empty()) return {};
            bool container = is_openable_kind(kind_of_entity(recep));
            out.push_back({container ? Variable::in(obj, recep) : Variable::on(obj, recep), true});
        } else if (phrase.rfind("make the ", 0) == 0) {
            std::string_view rest = std::string_view(phrase).substr(9);
            auto sp = rest.rfind(' ');
            if (sp == std::string_view::npos) return {};
            auto attr = attr_from_string(rest.substr(sp + 1));
            std::string obj(trim_view(rest.substr(0, sp)));
            if (!attr || obj.empty()) return {};
            out.push_back({Variable::attribute(obj, *attr), true});
        } else if (phrase.rfind("turn on the ", 0) == 0) {
            std::string obj(trim_view(std::string_view(phrase).substr(12)));
            if (obj.empty()) return {};
            out.push_back({Variable::attribute(obj, Attr::Toggled), true});
        } else if (phrase.rfind("pick up the ", 0) == 0) {
            std::string obj(trim_view(std::string_view(phrase).substr(12)));
            if (obj.empty()) return {};
            out.push_back({Variable::holding(obj), true});
        } else {
            return {};
        }
    }
    return out;
}

namespace {

struct GenAttempt {
    WorldState world;
    TaskSpec task;
};

const std::vector<std::string> kObjectKinds = {
    "apple", "egg", "tomato", "bread", "mug",  "plate",
    "knife", "spoon", "book",  "keychain", "soap", "cloth",
};

std::vector<std::string> surface_receptacles() {
    return {"countertop 1", "countertop 2", "shelf 1", "desk 1", "sinkbasin 1"};
}

std::vector<std::string> openable_receptacles() {
    return {"drawer 1", "drawer 2", "cabinet 1", "cabinet 2", "fridge 1", "microwave 1"};
}

WorldState base_house(std::uint64_t seed) {
    WorldState w;
    w.rng_seed = seed;
    auto add_recep = [&](const std::string& id, const std::string& kind) {
        ReceptacleState r;
        r.kind = kind;
        r.openable = is_openable_kind(kind);
        r.open = !r.openable;
        w.receptacles[id] = r;
    };
    add_recep("countertop 1", "countertop");
    add_recep("countertop 2", "countertop");
    add_recep("shelf 1", "shelf");
    add_recep("desk 1", "desk");
    add_recep("sinkbasin 1", "sinkbasin");
    add_recep("drawer 1", "drawer");
    add_recep("drawer 2", "drawer");
    add_recep("cabinet 1", "cabinet");
    add_recep("cabinet 2", "cabinet");
    add_recep("fridge 1", "fridge");
    add_recep("microwave 1", "microwave");

    w.objects["desklamp 1"] = ObjectState{"desklamp", "desk 1", false, false, false, false};
    return w;
}

Attr family_attr(TaskFamily f) {
    switch (f) {
        case TaskFamily::PickCleanPlace: return Attr::Clean;
        case TaskFamily::PickHeatPlace: return Attr::Hot;
        case TaskFamily::PickCoolPlace: return Attr::Cold;
        default: return Attr::Toggled;  // unused
    }
}

bool family_has_attr(TaskFamily f) {
    return f == TaskFamily::PickCleanPlace || f == TaskFamily::PickHeatPlace ||
           f == TaskFamily::PickCoolPlace;
}

// Builds the solution plan for a constructed layout, mirroring the step
// semantics: fetch each object in goal order, run it through the needed
// appliance, and place it.
std::vector<ActionCommand> build_reference_plan(const WorldState& world,
                                                const std::vector<Literal>& goal) {
    std::vector<ActionCommand> plan;
    std::string at = world.agent_at;
    std::set<std::string> open;
    for (const auto& [id, r] : world.receptacles)
        if (r.open) open.insert(id);

    std::map<std::string, std::string> loc;
    for (const auto& [id, o] : world.objects) loc[id] = o.location;

    auto go = [&](const std::string& r) {
        if (at != r) {
            plan.push_back(ActionCommand::go_to(r));
            at = r;
        }
    };
    auto ensure_open = [&](const std::string& r) {
        if (world.receptacles.at(r).openable && !open.count(r)) {
            plan.push_back(ActionCommand::open(r));
            open.insert(r);
        }
    };
    auto fetch = [&](const std::string& obj) {
        if (loc[obj] == kAgentHand) return;
        go(loc[obj]);
        ensure_open(loc[obj]);
        plan.push_back(ActionCommand::take(obj, loc[obj]));
        loc[obj] = kAgentHand;
    };

    for (const Literal& lit : goal) {
        const Variable& v = lit.var;
        switch (v.kind) {
            case VarKind::Attribute: {
                if (v.attr == Attr::Toggled) {
                    const std::string lamp_at = world.objects.at(v.object).location;
                    go(lamp_at);
                    plan.push_back(ActionCommand::toggle(v.object, lamp_at));
                } else {
                    fetch(v.object);
                    std::string app(appliance_kind_for(v.attr));
                    app += " 1";
                    go(app);
                    switch (v.attr) {
                        case Attr::Clean: plan.push_back(ActionCommand::clean(v.object, app)); break;
                        case Attr::Hot: plan.push_back(ActionCommand::heat(v.object, app)); break;
                        default: plan.push_back(ActionCommand::cool(v.object, app)); break;
                    }
                }
                break;
            }
            case VarKind::In:
            case VarKind::On: {
                fetch(v.object);
                go(v.recep);
                ensure_open(v.recep);
                plan.push_back(ActionCommand::put(v.object, v.recep));
                loc[v.object] = v.recep;
                break;
            }
            case VarKind::Holding:
                fetch(v.object);
                break;
            default:
                break;
        }
    }
    return plan;
}

std::optional<GenAttempt> try_generate(std::uint64_t attempt_seed, std::uint64_t base_seed,
                                       TaskFamily family, Difficulty difficulty) {
    std::mt19937_64 rng(attempt_seed);
    auto pick = [&](const std::vector<std::string>& pool) {
        return pool[rng() % pool.size()];
    };

    WorldState world = base_house(base_seed);
    const auto surfaces = surface_receptacles();
    const auto openables = openable_receptacles();

    int n_objects = 1;
    switch (family) {
        case TaskFamily::PickPlace:
            n_objects = difficulty == Difficulty::Easy ? 1
                        : difficulty == Difficulty::Medium ? 1 + static_cast<int>(rng() % 2)
                        : difficulty == Difficulty::Hard ? 2
                                                         : 3;
            break;
        case TaskFamily::PickCleanPlace:
        case TaskFamily::PickHeatPlace:
        case TaskFamily::PickCoolPlace:
            n_objects = (difficulty == Difficulty::Hard || difficulty == Difficulty::VeryHard) ? 2
                                                                                               : 1;
            break;
        case TaskFamily::PickTwo:
            n_objects = 2;
            break;
        case TaskFamily::LookInLight:
            n_objects = 1;
            break;
    }

    // Choose goal object kinds. PickTwo uses two instances of one kind.
    std::vector<std::string> kinds = kObjectKinds;
    std::shuffle(kinds.begin(), kinds.end(), rng);
    std::vector<std::string> goal_objects;
    std::map<std::string, int> kind_counts;
    for (int i = 0; i < n_objects; ++i) {
        std::string kind = family == TaskFamily::PickTwo ? kinds[0] : kinds[i];
        int idx = ++kind_counts[kind];
        goal_objects.push_back(kind + " " + std::to_string(idx));
    }

    bool easyish = difficulty == Difficulty::Easy;

    // Place goal objects. Easy tasks keep sources on surfaces (or at the
    // appliance for the attribute families); harder bins mix in closed
    // receptacles and let the bin filter select a fitting combination.
    std::vector<std::string> srcs;
    for (int i = 0; i < n_objects; ++i) {
        std::string src;
        if (easyish) {
            if (family_has_attr(family)) {
                Attr a = family_attr(family);
                src = std::string(appliance_kind_for(a)) + " 1";
                world.receptacles.at(src).open = true;  // reachable without an open step
            } else {
                src = pick(surfaces);
            }
        } else {
            bool closed_src = (rng() % 2) == 0 || difficulty == Difficulty::VeryHard;
            src = closed_src ? pick(openables) : pick(surfaces);
        }
        srcs.push_back(src);
        std::string kind = kind_of_entity(goal_objects[i]);
        world.objects[goal_objects[i]] = ObjectState{kind, src, false, false, false, false};
    }

    // Targets: a shared target for PickTwo, otherwise per-object with a
    // chance of sharing. A target must differ from that object's source.
    std::vector<std::string> tgts;
    std::string shared_tgt;
    for (int i = 0; i < n_objects; ++i) {
        std::string tgt;
        if (family == TaskFamily::PickTwo && !shared_tgt.empty()) {
            tgt = shared_tgt;
        } else {
            for (int guard = 0; guard < 32; ++guard) {
                bool closed_tgt = !easyish && (rng() % 3) == 0;
                tgt = closed_tgt ? pick(openables) : pick(surfaces);
                if (tgt != srcs[i] && tgt != "sinkbasin 1") break;
            }
            if (family == TaskFamily::PickTwo) shared_tgt = tgt;
        }
        if (tgt == srcs[i]) return std::nullopt;
        tgts.push_back(tgt);
    }

    // Agent start; Easy variants start at the first source.
    std::vector<std::string> all_receps;
    for (const auto& [id, r] : world.receptacles) all_receps.push_back(id);
    world.agent_at = easyish ? srcs[0] : pick(all_receps);

    // Goal literals in execution order: attributes before placement.
    std::vector<Literal> goal;
    if (family == TaskFamily::LookInLight) {
        goal.push_back({Variable::holding(goal_objects[0]), true});
        goal.push_back({Variable::attribute("desklamp 1", Attr::Toggled), true});
    } else {
        for (int i = 0; i < n_objects; ++i) {
            if (family_has_attr(family))
                goal.push_back({Variable::attribute(goal_objects[i], family_attr(family)), true});
            bool container = is_openable_kind(kind_of_entity(tgts[i]));
            goal.push_back({container ? Variable::in(goal_objects[i], tgts[i])
                                      : Variable::on(goal_objects[i], tgts[i]),
                            true});
        }
    }

    // Distractor objects on random receptacles (kinds unused by the goal).
    int n_distractors = 2 + static_cast<int>(rng() % 3);
    int placed = 0;
    for (size_t k = 0; k < kinds.size() && placed < n_distractors; ++k) {
        const std::string& kind = kinds[kinds.size() - 1 - k];
        if (kind_counts.count(kind)) continue;
        std::string id = kind + " 1";
        std::string at = pick(all_receps);
        if (at == "sinkbasin 1") at = "countertop 1";
        world.objects[id] = ObjectState{kind, at, false, false, false, false};
        ++placed;
    }

    TaskSpec task;
    task.family = family;
    task.goal = goal;
    task.instruction = render_instruction(goal);
    task.reference_plan = build_reference_plan(world, goal);
    task.subgoal_count = static_cast<int>(task.reference_plan.size());
    task.difficulty = difficulty;

    auto [lo, hi] = subgoal_range(difficulty);
    if (task.subgoal_count < lo || task.subgoal_count > hi) return std::nullopt;
    return GenAttempt{std::move(world), std::move(task)};
}

}  // namespace

Environment reset(const ResetOptions& opts) {
    if (opts.horizon <= 0) throw ConfigError("horizon must be positive");

    constexpr int kMaxAttempts = 200;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        auto gen = try_generate(mix_seed(opts.seed, static_cast<std::uint64_t>(attempt)),
                                opts.seed, opts.family, opts.difficulty);
        if (!gen) continue;

        // The layout is only accepted if replaying the reference plan
        // actually reaches the goal.
        Environment probe_env(gen->world, gen->task, opts.horizon + gen->task.subgoal_count + 1);
        bool solved = false;
        for (const ActionCommand& a : gen->task.reference_plan) {
            StepResult r = probe_env.step(a);
            if (!r.obs.valid) break;
            if (r.done) {
                solved = r.reward == 1;
                break;
            }
        }
        if (!solved) continue;

        return Environment(std::move(gen->world), std::move(gen->task), opts.horizon);
    }
    throw GenerationError("no solvable " + std::string(to_string(opts.family)) + "/" +
                          std::string(to_string(opts.difficulty)) +
                          " layout found for seed " + std::to_string(opts.seed) +
                          " within bounded retries");
}

}  // namespace evu::minihouse
