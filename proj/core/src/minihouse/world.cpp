#include "evu/minihouse/world.hpp"

#include <algorithm>

#include "evu/errors.hpp"

namespace evu::minihouse {

namespace {

const ObjectState* find_object(const WorldState& s, std::string_view id) {
    auto it = s.objects.find(std::string(id));
    return it == s.objects.end() ? nullptr : &it->second;
}

const ReceptacleState* find_recep(const WorldState& s, std::string_view id) {
    auto it = s.receptacles.find(std::string(id));
    return it == s.receptacles.end() ? nullptr : &it->second;
}

bool attr_value(const ObjectState& o, Attr a) {
    switch (a) {
        case Attr::Clean: return o.clean;
        case Attr::Hot: return o.hot;
        case Attr::Cold: return o.cold;
        case Attr::Toggled: return o.toggled;
    }
    return false;
}

// Objects currently inside/on a receptacle, in map (lexicographic) order.
std::vector<std::string> contents_of(const WorldState& s, const std::string& recep) {
    std::vector<std::string> out;
    for (const auto& [id, obj] : s.objects)
        if (obj.location == recep) out.push_back(id);
    return out;
}

// "a knife 1", with attribute adjectives: "a clean hot apple 1".
std::string described_item(const WorldState& s, const std::string& id) {
    const ObjectState& o = s.objects.at(id);
    std::string adj;
    if (o.clean) adj += "clean ";
    if (o.hot) adj += "hot ";
    if (o.cold) adj += "cold ";
    std::string noun = adj + id;
    return std::string(article_for(noun)) + " " + noun;
}

std::string joined_list(const std::vector<std::string>& items) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += (i + 1 == items.size()) ? " and " : ", ";
        out += items[i];
    }
    return out;
}

// "On the countertop 1, you see a knife 1 and an apple 1." plus a
// "turned on" sentence for any toggled object. Appends the revealed
// location/attribute literals.
std::string contents_sentence(const WorldState& s, const std::string& recep,
                              std::vector<Literal>* revealed) {
    const ReceptacleState& r = s.receptacles.at(recep);
    bool surface = !r.openable;
    std::string prep = surface ? "On" : "In";
    std::vector<std::string> items;
    std::string extra;
    for (const std::string& id : contents_of(s, recep)) {
        items.push_back(described_item(s, id));
        const ObjectState& o = s.objects.at(id);
        if (revealed) {
            Variable loc = surface ? Variable::on(id, recep) : Variable::in(id, recep);
            revealed->push_back({loc, true});
            if (o.clean) revealed->push_back({Variable::attribute(id, Attr::Clean), true});
            if (o.hot) revealed->push_back({Variable::attribute(id, Attr::Hot), true});
            if (o.cold) revealed->push_back({Variable::attribute(id, Attr::Cold), true});
            if (o.toggled) revealed->push_back({Variable::attribute(id, Attr::Toggled), true});
        }
        if (o.toggled) extra += " The " + id + " is turned on.";
    }
    std::string text = prep + " the " + recep + ", you see ";
    text += items.empty() ? "nothing" : joined_list(items);
    text += ".";
    text += extra;
    return text;
}

}  // namespace

bool is_openable_kind(std::string_view kind) {
    return kind == "drawer" || kind == "cabinet" || kind == "fridge" || kind == "microwave";
}

bool is_toggleable_kind(std::string_view kind) { return kind == "desklamp"; }

std::string_view preposition_for_kind(std::string_view recep_kind) {
    return is_openable_kind(recep_kind) ? "in" : "on";
}

std::string_view appliance_kind_for(Attr a) {
    switch (a) {
        case Attr::Clean: return "sinkbasin";
        case Attr::Hot: return "microwave";
        case Attr::Cold: return "fridge";
        case Attr::Toggled: return "";
    }
    return "";
}

std::string kind_of_entity(std::string_view entity) {
    auto sp = entity.rfind(' ');
    if (sp == std::string_view::npos) return std::string(entity);
    std::string_view tail = entity.substr(sp + 1);
    bool numeric = !tail.empty() &&
                   std::all_of(tail.begin(), tail.end(),
                               [](unsigned char c) { return std::isdigit(c); });
    return std::string(numeric ? entity.substr(0, sp) : entity);
}

std::string_view article_for(std::string_view entity) {
    if (entity.empty()) return "a";
    switch (entity.front()) {
        case 'a': case 'e': case 'i': case 'o': case 'u': return "an";
        default: return "a";
    }
}

int query_variable(const WorldState& state, const Variable& v) {
    switch (v.kind) {
        case VarKind::Holding: {
            const ObjectState* o = find_object(state, v.object);
            if (!o) throw SchemaError("unknown object in " + v.canonical());
            return o->location == kAgentHand ? +1 : -1;
        }
        case VarKind::In:
        case VarKind::On: {
            const ObjectState* o = find_object(state, v.object);
            if (!o) throw SchemaError("unknown object in " + v.canonical());
            if (!find_recep(state, v.recep))
                throw SchemaError("unknown receptacle in " + v.canonical());
            return o->location == v.recep ? +1 : -1;
        }
        case VarKind::Open: {
            const ReceptacleState* r = find_recep(state, v.recep);
            if (!r) throw SchemaError("unknown receptacle in " + v.canonical());
            return r->open ? +1 : -1;
        }
        case VarKind::Attribute: {
            const ObjectState* o = find_object(state, v.object);
            if (!o) throw SchemaError("unknown object in " + v.canonical());
            return attr_value(*o, v.attr) ? +1 : -1;
        }
        case VarKind::At:
            throw SchemaError("At is not in the probe variable schema: " + v.canonical());
    }
    throw SchemaError("malformed variable");
}

std::string oracle_state_text(const WorldState& state, std::span<const Variable> variables) {
    std::string out;
    for (const Variable& v : variables) {
        if (!out.empty()) out += " ";
        switch (v.kind) {
            case VarKind::Holding: {
                bool holds = query_variable(state, v) > 0;
                out += holds ? "You are holding the " + v.object + "."
                             : "You are not holding the " + v.object + ".";
                break;
            }
            case VarKind::In:
            case VarKind::On: {
                bool holds = query_variable(state, v) > 0;
                const ReceptacleState* r = find_recep(state, v.recep);
                std::string prep{preposition_for_kind(r->kind)};
                out += "The " + v.object + " is " + (holds ? "" : "not ") + prep + " the " +
                       v.recep + ".";
                break;
            }
            case VarKind::Open: {
                bool holds = query_variable(state, v) > 0;
                out += "The " + v.recep + " is " + (holds ? "open." : "closed.");
                break;
            }
            case VarKind::Attribute: {
                bool holds = query_variable(state, v) > 0;
                if (v.attr == Attr::Toggled) {
                    out += "The " + v.object + " is turned " + (holds ? "on." : "off.");
                } else {
                    out += "The " + v.object + " is " + (holds ? "" : "not ") +
                           std::string(to_string(v.attr)) + ".";
                }
                break;
            }
            case VarKind::At: {
                if (!find_recep(state, v.recep))
                    throw SchemaError("unknown receptacle in " + v.canonical());
                bool holds = state.agent_at == v.recep;
                out += holds ? "You are at the " + v.recep + "."
                             : "You are not at the " + v.recep + ".";
                break;
            }
        }
    }
    return out;
}

bool goal_satisfied(const WorldState& state, const std::vector<Literal>& goal) {
    for (const Literal& lit : goal) {
        bool holds = query_variable(state, lit.var) > 0;
        if (holds != lit.truth) return false;
    }
    return true;
}

Environment::Environment(WorldState state, TaskSpec task, int horizon)
    : state_(std::move(state)), task_(std::move(task)), horizon_(horizon) {
    initial_obs_ = render_initial_observation(state_);
}

StepResult Environment::step(const ActionCommand& action) {
    if (done_) throw ContractError("step called on a terminal environment");

    Observation obs;
    const std::string& arg1 = action.arg1;
    const std::string& arg2 = action.arg2;

    auto invalid = [&] {
        obs.text = kNothingHappened;
        obs.valid = false;
        obs.revealed.clear();
        return obs;
    };

    switch (action.verb) {
        case Verb::GoTo: {
            const ReceptacleState* r = find_recep(state_, arg1);
            if (!r || state_.agent_at == arg1) { invalid(); break; }
            state_.agent_at = arg1;
            obs.text = "You arrive at the " + arg1 + ". ";
            obs.revealed.push_back({Variable::at(arg1), true});
            if (r->open) {
                obs.text += contents_sentence(state_, arg1, &obs.revealed);
                if (r->openable) obs.revealed.push_back({Variable::open(arg1), true});
            } else {
                obs.text += "The " + arg1 + " is closed.";
                obs.revealed.push_back({Variable::open(arg1), false});
            }
            break;
        }
        case Verb::Take: {
            const ObjectState* o = find_object(state_, arg1);
            const ReceptacleState* r = find_recep(state_, arg2);
            bool hand_free = contents_of(state_, kAgentHand).empty();
            if (!o || !r || state_.agent_at != arg2 || o->location != arg2 || !r->open ||
                !hand_free) {
                invalid();
                break;
            }
            state_.objects.at(arg1).location = kAgentHand;
            obs.text = "You pick up the " + arg1 + " from the " + arg2 + ".";
            obs.revealed.push_back({Variable::holding(arg1), true});
            Variable was = r->openable ? Variable::in(arg1, arg2) : Variable::on(arg1, arg2);
            obs.revealed.push_back({was, false});
            break;
        }
        case Verb::Put: {
            const ObjectState* o = find_object(state_, arg1);
            const ReceptacleState* r = find_recep(state_, arg2);
            if (!o || !r || state_.agent_at != arg2 || o->location != kAgentHand || !r->open) {
                invalid();
                break;
            }
            state_.objects.at(arg1).location = arg2;
            obs.text = "You put the " + arg1 + " in/on the " + arg2 + ".";
            Variable now = r->openable ? Variable::in(arg1, arg2) : Variable::on(arg1, arg2);
            obs.revealed.push_back({now, true});
            obs.revealed.push_back({Variable::holding(arg1), false});
            break;
        }
        case Verb::Open: {
            const ReceptacleState* r = find_recep(state_, arg1);
            if (!r || state_.agent_at != arg1 || !r->openable || r->open) { invalid(); break; }
            state_.receptacles.at(arg1).open = true;
            obs.text = "You open the " + arg1 + ". " + contents_sentence(state_, arg1, &obs.revealed);
            obs.revealed.push_back({Variable::open(arg1), true});
            break;
        }
        case Verb::Close: {
            const ReceptacleState* r = find_recep(state_, arg1);
            if (!r || state_.agent_at != arg1 || !r->openable || !r->open) { invalid(); break; }
            state_.receptacles.at(arg1).open = false;
            obs.text = "You close the " + arg1 + ".";
            obs.revealed.push_back({Variable::open(arg1), false});
            break;
        }
        case Verb::Toggle: {
            const ObjectState* o = find_object(state_, arg1);
            if (!o || !find_recep(state_, arg2) || state_.agent_at != arg2 ||
                o->location != arg2 || !is_toggleable_kind(o->kind)) {
                invalid();
                break;
            }
            ObjectState& obj = state_.objects.at(arg1);
            obj.toggled = !obj.toggled;
            obs.text = obj.toggled ? "You turn on the " + arg1 + "."
                                   : "You turn off the " + arg1 + ".";
            obs.revealed.push_back({Variable::attribute(arg1, Attr::Toggled), obj.toggled});
            break;
        }
        case Verb::Clean:
        case Verb::Heat:
        case Verb::Cool: {
            const ObjectState* o = find_object(state_, arg1);
            const ReceptacleState* r = find_recep(state_, arg2);
            Attr attr = action.verb == Verb::Clean ? Attr::Clean
                        : action.verb == Verb::Heat ? Attr::Hot
                                                    : Attr::Cold;
            if (!o || !r || state_.agent_at != arg2 || o->location != kAgentHand ||
                r->kind != appliance_kind_for(attr)) {
                invalid();
                break;
            }
            ObjectState& obj = state_.objects.at(arg1);
            std::string verb_word;
            switch (action.verb) {
                case Verb::Clean: obj.clean = true; verb_word = "clean"; break;
                case Verb::Heat: obj.hot = true; obj.cold = false; verb_word = "heat"; break;
                default: obj.cold = true; obj.hot = false; verb_word = "cool"; break;
            }
            obs.text = "You " + verb_word + " the " + arg1 + " using the " + arg2 + ".";
            obs.revealed.push_back({Variable::attribute(arg1, attr), true});
            if (action.verb == Verb::Heat)
                obs.revealed.push_back({Variable::attribute(arg1, Attr::Cold), false});
            if (action.verb == Verb::Cool)
                obs.revealed.push_back({Variable::attribute(arg1, Attr::Hot), false});
            break;
        }
    }

    state_.step_count += 1;

    StepResult result;
    result.obs = std::move(obs);
    if (goal_satisfied(state_, task_.goal)) {
        result.reward = 1;
        result.done = true;
    } else if (state_.step_count >= horizon_) {
        result.done = true;
    }
    done_ = result.done;
    return result;
}

Observation render_initial_observation(const WorldState& state) {
    Observation obs;
    std::vector<std::string> roster;
    for (const auto& [id, r] : state.receptacles)
        roster.push_back(std::string(article_for(id)) + " " + id);

    obs.text = "You are in the middle of the room. You are at the " + state.agent_at +
               ". Looking around you, you see " + joined_list(roster) + ".";
    obs.revealed.push_back({Variable::at(state.agent_at), true});

    for (const auto& [id, r] : state.receptacles) {
        obs.text += " ";
        if (r.open) {
            obs.text += contents_sentence(state, id, &obs.revealed);
            if (r.openable) obs.revealed.push_back({Variable::open(id), true});
        } else {
            obs.text += "The " + id + " is closed.";
            obs.revealed.push_back({Variable::open(id), false});
        }
    }
    return obs;
}

}  // namespace evu::minihouse
