#include "evu/backend/scripted.hpp"

#include <algorithm>
#include <cctype>

#include "evu/agent/belief.hpp"
#include "evu/errors.hpp"
#include "evu/minihouse/world.hpp"

namespace evu::backend {

using minihouse::ActionCommand;
using minihouse::Attr;
using minihouse::Literal;
using minihouse::Variable;
using minihouse::VarKind;
using minihouse::Verb;

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::optional<std::string> strip_prefix(std::string_view s, std::string_view prefix) {
    if (s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0)
        return std::string(trim(s.substr(prefix.size())));
    return std::nullopt;
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start < text.size()) {
        size_t end = text.find('.', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view sentence = trim(text.substr(start, end - start));
        if (!sentence.empty()) out.emplace_back(sentence);
        start = end + 1;
    }
    return out;
}

// "a clean apple 1, an egg 1 and a knife 1" -> item strings.
std::vector<std::string> split_item_list(std::string_view s) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start < s.size()) {
        size_t comma = s.find(", ", start);
        size_t conj = s.find(" and ", start);
        size_t end = std::min(comma == std::string_view::npos ? s.size() : comma,
                              conj == std::string_view::npos ? s.size() : conj);
        std::string_view item = trim(s.substr(start, end - start));
        if (!item.empty()) out.emplace_back(item);
        if (end == s.size()) break;
        start = end + (end == comma ? 2 : 5);
    }
    return out;
}

std::string strip_article(std::string_view item) {
    if (auto r = strip_prefix(item, "a ")) return *r;
    if (auto r = strip_prefix(item, "an ")) return *r;
    if (auto r = strip_prefix(item, "the ")) return *r;
    return std::string(trim(item));
}

struct EnumeratedItem {
    std::string entity;
    std::vector<Attr> attrs;
};

EnumeratedItem parse_item(std::string_view item) {
    EnumeratedItem out;
    std::string core = strip_article(item);
    bool progressed = true;
    while (progressed) {
        progressed = false;
        for (Attr a : {Attr::Clean, Attr::Hot, Attr::Cold}) {
            std::string word = std::string(minihouse::to_string(a)) + " ";
            if (auto r = strip_prefix(core, word)) {
                out.attrs.push_back(a);
                core = *r;
                progressed = true;
            }
        }
    }
    out.entity = core;
    return out;
}

std::string_view prep_for(std::string_view recep) {
    return minihouse::preposition_for_kind(minihouse::kind_of_entity(recep));
}

// "The apple 1 is in the fridge 1." with truth-dependent negation.
std::string location_sentence(const std::string& obj, const std::string& recep, bool truth) {
    return "The " + obj + " is " + (truth ? "" : "not ") + std::string(prep_for(recep)) +
           " the " + recep + ".";
}

std::string literal_sentence(const Literal& lit) {
    const Variable& v = lit.var;
    switch (v.kind) {
        case VarKind::Holding:
            return std::string("You are ") + (lit.truth ? "" : "not ") + "holding the " +
                   v.object + ".";
        case VarKind::In:
        case VarKind::On:
            return location_sentence(v.object, v.recep, lit.truth);
        case VarKind::Open:
            return "The " + v.recep + " is " + (lit.truth ? "open." : "closed.");
        case VarKind::Attribute:
            if (v.attr == Attr::Toggled)
                return "The " + v.object + " is turned " + (lit.truth ? "on." : "off.");
            return "The " + v.object + " is " + (lit.truth ? "" : "not ") +
                   std::string(minihouse::to_string(v.attr)) + ".";
        case VarKind::At:
            return std::string("You are ") + (lit.truth ? "" : "not ") + "at the " + v.recep + ".";
    }
    return {};
}

std::string joined_names(const std::vector<std::string>& names) {
    std::string out;
    for (size_t i = 0; i < names.size(); ++i) {
        if (i > 0) out += (i + 1 == names.size()) ? " and " : ", ";
        out += "the " + names[i];
    }
    return out;
}

// --- prompt line model ---

enum class LineKind { Goal, Observation, Action, Oracle, Belief, Estimate, Verification, Other };

struct PromptLine {
    LineKind kind = LineKind::Other;
    std::string body;
};

std::vector<PromptLine> parse_prompt_lines(const std::string& prompt) {
    std::vector<PromptLine> out;
    size_t start = 0;
    while (start <= prompt.size()) {
        size_t end = prompt.find('\n', start);
        if (end == std::string::npos) end = prompt.size();
        std::string_view raw = trim(std::string_view(prompt).substr(start, end - start));
        start = end + 1;
        if (raw.empty()) continue;

        PromptLine line;
        auto classify = [&](std::string_view prefix, LineKind kind) {
            if (auto body = strip_prefix(raw, prefix)) {
                // Format-block placeholders ("Action: <your next action>")
                // are instructions, not context.
                if (!body->empty() && body->front() == '<') return false;
                line.kind = kind;
                line.body = *body;
                return true;
            }
            return false;
        };

        if (classify("Your task is to complete the task goal: ", LineKind::Goal) ||
            classify("Task: ", LineKind::Goal) ||
            classify("Observation: ", LineKind::Observation) ||
            classify("Action: ", LineKind::Action) ||
            classify("Environment State: ", LineKind::Oracle) ||
            classify("Belief State: ", LineKind::Belief) ||
            classify("Estimate: ", LineKind::Estimate) ||
            classify("Verification: ", LineKind::Verification)) {
            out.push_back(std::move(line));
        }
        if (end == prompt.size()) break;
    }
    return out;
}

// Keeps the task setup (goal, pre-action lines), all trusted lines, and
// the last `window` action/observation turn units.
std::vector<PromptLine> apply_window(std::vector<PromptLine> lines, int window) {
    int total_units = 0;
    for (const PromptLine& l : lines)
        if (l.kind == LineKind::Action) ++total_units;
    if (total_units <= window) return lines;

    std::vector<PromptLine> kept;
    int unit = 0;  // 0 until the first Action line
    for (PromptLine& l : lines) {
        if (l.kind == LineKind::Action) ++unit;
        bool in_window = unit == 0 || unit > total_units - window;
        bool always = l.kind == LineKind::Goal || l.kind == LineKind::Oracle ||
                      l.kind == LineKind::Belief || l.kind == LineKind::Estimate ||
                      l.kind == LineKind::Verification;
        if (in_window || always) kept.push_back(std::move(l));
    }
    return kept;
}

// --- knowledge construction ---

constexpr std::string_view kSearchedPrefix = "you have already searched ";
constexpr std::string_view kRosterPrefix = "the room contains ";

struct Builder {
    const ScriptedConfig& cfg;
    ScriptedKnowledge k;
    // Estimate bookkeeping for verification generation.
    std::vector<Literal> expected;
    std::vector<std::pair<std::string, std::string>> hedged;  // (obj, recep)
    std::vector<Literal> last_obs_literals;

    explicit Builder(const ScriptedConfig& c) : cfg(c) {}

    bool neglect() const { return cfg.neglect_mode == NeglectMode::ForcedNeglect; }

    std::set<std::string> goal_objects() const {
        std::set<std::string> out;
        for (const Literal& lit : k.goal)
            if (!lit.var.object.empty()) out.insert(lit.var.object);
        return out;
    }

    void apply(const Literal& lit) {
        const Variable& v = lit.var;
        switch (v.kind) {
            case VarKind::Holding:
                if (lit.truth) {
                    k.object_location[v.object] = minihouse::kAgentHand;
                    k.hand_empty = false;
                } else if (auto it = k.object_location.find(v.object);
                           it != k.object_location.end() && it->second == minihouse::kAgentHand) {
                    k.object_location.erase(it);
                }
                break;
            case VarKind::In:
            case VarKind::On:
                if (lit.truth) {
                    k.object_location[v.object] = v.recep;
                    k.excluded[v.object].erase(v.recep);
                } else {
                    k.excluded[v.object].insert(v.recep);
                    if (auto it = k.object_location.find(v.object);
                        it != k.object_location.end() && it->second == v.recep)
                        k.object_location.erase(it);
                }
                k.roster.insert(v.recep);
                break;
            case VarKind::Open:
                k.recep_open[v.recep] = lit.truth;
                k.roster.insert(v.recep);
                break;
            case VarKind::Attribute:
                k.attrs[v.object][v.attr] = lit.truth;
                break;
            case VarKind::At:
                if (lit.truth) k.at = v.recep;
                k.roster.insert(v.recep);
                break;
        }
    }

    // Sentence forms specific to belief/estimate/oracle text.
    bool apply_special(const std::string& sentence_lower) {
        if (auto rest = strip_prefix(sentence_lower, kSearchedPrefix)) {
            for (const std::string& item : split_item_list(*rest))
                k.searched.insert(strip_article(item));
            return true;
        }
        if (auto rest = strip_prefix(sentence_lower, kRosterPrefix)) {
            for (const std::string& item : split_item_list(*rest))
                k.roster.insert(strip_article(item));
            return true;
        }
        if (auto rest = strip_prefix(sentence_lower, "the location of the ")) {
            auto pos = rest->find(" is unknown");
            if (pos != std::string::npos) {
                k.object_location.erase(rest->substr(0, pos));
                return true;
            }
        }
        if (auto rest = strip_prefix(sentence_lower, "the ")) {
            auto pos = rest->find(" may or may not be ");
            if (pos != std::string::npos) {
                std::string obj = rest->substr(0, pos);
                std::string tail = rest->substr(pos + 19);
                std::string recep;
                if (auto r = strip_prefix(tail, "in the ")) recep = *r;
                else if (auto r2 = strip_prefix(tail, "on the ")) recep = *r2;
                if (!obj.empty() && !recep.empty()) {
                    if (auto it = k.object_location.find(obj);
                        it != k.object_location.end() && it->second == recep)
                        k.object_location.erase(it);
                    k.excluded[obj].erase(recep);
                    return true;
                }
            }
        }
        return false;
    }

    void process_trusted(const std::string& body, LineKind kind) {
        for (const std::string& sentence : split_sentences(body)) {
            std::string s = lower(sentence);
            if (apply_special(s)) continue;
            std::string_view core = s;
            if (kind == LineKind::Estimate) {
                if (auto r = strip_prefix(s, "i expect that ")) {
                    if (auto lits = agent::extract_belief_facts(*r); !lits.empty()) {
                        for (const Literal& lit : lits) {
                            expected.push_back(lit);
                            apply(lit);
                        }
                    }
                    continue;
                }
                // Hedges inside estimates were handled by apply_special.
                continue;
            }
            if (kind == LineKind::Verification) {
                for (std::string_view prefix : {"confirmed: ", "contradicted: ", "surprise: "}) {
                    if (auto r = strip_prefix(core, prefix)) {
                        for (const Literal& lit : agent::extract_belief_facts(*r)) apply(lit);
                        core = {};
                        break;
                    }
                }
                if (core.empty()) continue;
            }
            for (const Literal& lit : agent::extract_belief_facts(std::string(core) + "."))
                apply(lit);
        }
    }

    // Hedge sentences may appear inside Estimate lines; collect them for
    // verification generation as well.
    void collect_hedges(const std::string& body) {
        for (const std::string& sentence : split_sentences(body)) {
            std::string s = lower(sentence);
            auto pos = s.find(" may or may not be ");
            if (pos == std::string::npos) continue;
            if (auto rest = strip_prefix(s, "the ")) {
                std::string obj = rest->substr(0, rest->find(" may or may not be "));
                std::string tail = rest->substr(rest->find(" may or may not be ") + 19);
                std::string recep;
                if (auto r = strip_prefix(tail, "in the ")) recep = *r;
                else if (auto r2 = strip_prefix(tail, "on the ")) recep = *r2;
                if (!obj.empty() && !recep.empty()) hedged.emplace_back(obj, recep);
            }
        }
    }

    void process_enumeration(const std::string& recep, bool surface,
                             const std::vector<EnumeratedItem>& items) {
        k.roster.insert(recep);
        k.searched.insert(recep);
        if (!surface) k.recep_open[recep] = true;

        std::set<std::string> goal_objs = goal_objects();
        std::set<std::string> mentioned;
        for (const EnumeratedItem& item : items) {
            mentioned.insert(item.entity);
            bool is_goal = goal_objs.count(item.entity) > 0;
            Variable loc = surface ? Variable::on(item.entity, recep)
                                   : Variable::in(item.entity, recep);
            Literal lit{loc, true};
            if (!(neglect() && is_goal)) {
                apply(lit);
                last_obs_literals.push_back(lit);
            }
            for (Attr a : item.attrs) {
                Literal alit{Variable::attribute(item.entity, a), true};
                apply(alit);
                last_obs_literals.push_back(alit);
            }
        }
        for (const std::string& o : goal_objs) {
            if (mentioned.count(o)) continue;
            apply({surface ? Variable::on(o, recep) : Variable::in(o, recep), false});
        }
    }

    void process_observation(const std::string& body) {
        k.last_observation_text = body;
        last_obs_literals.clear();
        if (trim(body) == minihouse::kNothingHappened) {
            // The only information in a failed action is the failure itself.
            if (k.last_action) {
                if (k.last_action->verb == Verb::Open) k.recep_open[k.last_action->arg1] = true;
                if (k.last_action->verb == Verb::GoTo) k.at = k.last_action->arg1;
            }
            return;
        }
        for (const std::string& sentence : split_sentences(body)) {
            std::string s = lower(sentence);

            if (auto rest = strip_prefix(s, "you arrive at the ")) {
                k.at = *rest;
                k.roster.insert(*rest);
                continue;
            }
            if (auto rest = strip_prefix(s, "looking around you, you see ")) {
                for (const std::string& item : split_item_list(*rest))
                    k.roster.insert(strip_article(item));
                continue;
            }
            bool handled = false;
            for (std::string_view prep : {"on the ", "in the "}) {
                if (auto rest = strip_prefix(s, prep)) {
                    auto pos = rest->find(", you see ");
                    if (pos == std::string::npos) break;
                    std::string recep = rest->substr(0, pos);
                    std::string list = rest->substr(pos + 10);
                    std::vector<EnumeratedItem> items;
                    if (list != "nothing")
                        for (const std::string& it : split_item_list(list))
                            items.push_back(parse_item(it));
                    process_enumeration(recep, prep == "on the ", items);
                    handled = true;
                    break;
                }
            }
            if (handled) continue;

            if (auto rest = strip_prefix(s, "you open the ")) {
                apply({Variable::open(*rest), true});
                continue;
            }
            if (auto rest = strip_prefix(s, "you close the ")) {
                apply({Variable::open(*rest), false});
                continue;
            }
            if (auto rest = strip_prefix(s, "you pick up the ")) {
                auto pos = rest->find(" from the ");
                if (pos != std::string::npos) {
                    Literal lit{Variable::holding(rest->substr(0, pos)), true};
                    apply(lit);
                    last_obs_literals.push_back(lit);
                }
                continue;
            }
            if (auto rest = strip_prefix(s, "you put the ")) {
                auto pos = rest->find(" in/on the ");
                if (pos != std::string::npos) {
                    std::string obj = rest->substr(0, pos);
                    std::string recep = rest->substr(pos + 11);
                    bool surface = !minihouse::is_openable_kind(minihouse::kind_of_entity(recep));
                    Literal lit{surface ? Variable::on(obj, recep) : Variable::in(obj, recep),
                                true};
                    apply(lit);
                    last_obs_literals.push_back(lit);
                    k.hand_empty = true;
                }
                continue;
            }
            bool applied_feedback = false;
            for (auto [word, attr] : std::initializer_list<std::pair<std::string_view, Attr>>{
                     {"you clean the ", Attr::Clean},
                     {"you heat the ", Attr::Hot},
                     {"you cool the ", Attr::Cold}}) {
                if (auto rest = strip_prefix(s, word)) {
                    auto pos = rest->find(" using the ");
                    if (pos != std::string::npos) {
                        std::string obj = rest->substr(0, pos);
                        Literal lit{Variable::attribute(obj, attr), true};
                        apply(lit);
                        last_obs_literals.push_back(lit);
                        if (attr == Attr::Hot) apply({Variable::attribute(obj, Attr::Cold), false});
                        if (attr == Attr::Cold) apply({Variable::attribute(obj, Attr::Hot), false});
                    }
                    applied_feedback = true;
                    break;
                }
            }
            if (applied_feedback) continue;

            if (auto rest = strip_prefix(s, "you turn on the ")) {
                Literal lit{Variable::attribute(*rest, Attr::Toggled), true};
                apply(lit);
                last_obs_literals.push_back(lit);
                continue;
            }
            if (auto rest = strip_prefix(s, "you turn off the ")) {
                Literal lit{Variable::attribute(*rest, Attr::Toggled), false};
                apply(lit);
                last_obs_literals.push_back(lit);
                continue;
            }

            // Plain state sentences ("The fridge 1 is closed.", "You are
            // at the ...") fall through to the belief patterns.
            for (const Literal& lit : agent::extract_belief_facts(s + ".")) {
                apply(lit);
                last_obs_literals.push_back(lit);
            }
        }
        // Remember where the most recent enumeration happened.
        for (const std::string& sentence : split_sentences(body)) {
            std::string s = lower(sentence);
            for (std::string_view prep : {"on the ", "in the "}) {
                if (auto rest = strip_prefix(s, prep)) {
                    auto pos = rest->find(", you see ");
                    if (pos != std::string::npos) k.last_enumerated_recep = rest->substr(0, pos);
                }
            }
        }
    }

    void finalize() {
        // Searched receptacles imply absence for still-unlocated goal objects.
        for (const std::string& o : goal_objects()) {
            if (k.object_location.count(o)) continue;
            for (const std::string& r : k.searched) k.excluded[o].insert(r);
        }
        // ForcedNeglect: approaching a receptacle, the policy expects not
        // to find anything it has not already located there.
        if (neglect() && k.last_action &&
            (k.last_action->verb == Verb::GoTo || k.last_action->verb == Verb::Open)) {
            const std::string& r = k.last_action->arg1;
            for (const std::string& o : goal_objects())
                if (!k.object_location.count(o)) k.excluded[o].insert(r);
        }
    }

    void run(const std::vector<PromptLine>& lines) {
        for (const PromptLine& line : lines) {
            switch (line.kind) {
                case LineKind::Goal: {
                    auto atoms = minihouse::parse_instruction(line.body);
                    if (!atoms.empty()) {
                        k.goal = atoms;
                        for (const Literal& lit : atoms)
                            if (!lit.var.recep.empty()) k.roster.insert(lit.var.recep);
                    }
                    break;
                }
                case LineKind::Action:
                    k.last_action = minihouse::parse_action(line.body);
                    break;
                case LineKind::Observation:
                    process_observation(line.body);
                    break;
                case LineKind::Oracle:
                case LineKind::Belief:
                    process_trusted(line.body, line.kind);
                    break;
                case LineKind::Estimate:
                    process_trusted(line.body, LineKind::Estimate);
                    collect_hedges(line.body);
                    break;
                case LineKind::Verification:
                    process_trusted(line.body, LineKind::Verification);
                    break;
                case LineKind::Other:
                    break;
            }
        }
        finalize();
    }
};

}  // namespace

std::string_view to_string(NeglectMode m) {
    return m == NeglectMode::Compliant ? "compliant" : "forced_neglect";
}

std::optional<NeglectMode> neglect_mode_from_string(std::string_view s) {
    if (s == "compliant") return NeglectMode::Compliant;
    if (s == "forced_neglect") return NeglectMode::ForcedNeglect;
    return std::nullopt;
}

Verdict ScriptedKnowledge::verdict(const Variable& v) const {
    switch (v.kind) {
        case VarKind::Holding: {
            auto it = object_location.find(v.object);
            if (it != object_location.end())
                return it->second == minihouse::kAgentHand ? Verdict::True : Verdict::False;
            if (hand_empty && *hand_empty) return Verdict::False;
            if (held_object()) return Verdict::False;  // hand holds something else
            return Verdict::Unknown;
        }
        case VarKind::In:
        case VarKind::On: {
            auto it = object_location.find(v.object);
            if (it != object_location.end())
                return it->second == v.recep ? Verdict::True : Verdict::False;
            auto ex = excluded.find(v.object);
            if (ex != excluded.end() && ex->second.count(v.recep)) return Verdict::False;
            return Verdict::Unknown;
        }
        case VarKind::Open: {
            auto it = recep_open.find(v.recep);
            if (it != recep_open.end()) return it->second ? Verdict::True : Verdict::False;
            if (!minihouse::is_openable_kind(minihouse::kind_of_entity(v.recep)))
                return Verdict::True;  // surfaces are always accessible
            return Verdict::Unknown;
        }
        case VarKind::Attribute: {
            auto it = attrs.find(v.object);
            if (it != attrs.end()) {
                auto a = it->second.find(v.attr);
                if (a != it->second.end()) return a->second ? Verdict::True : Verdict::False;
            }
            return Verdict::Unknown;
        }
        case VarKind::At:
            if (at) return *at == v.recep ? Verdict::True : Verdict::False;
            return Verdict::Unknown;
    }
    return Verdict::Unknown;
}

std::optional<std::string> ScriptedKnowledge::held_object() const {
    for (const auto& [obj, loc] : object_location)
        if (loc == minihouse::kAgentHand) return obj;
    return std::nullopt;
}

ScriptedBackend::ScriptedBackend(ScriptedConfig cfg) : cfg_(cfg) {}

ScriptedKnowledge ScriptedBackend::knowledge_from_prompt(const std::string& prompt) const {
    Builder builder(cfg_);
    builder.run(apply_window(parse_prompt_lines(prompt), cfg_.context_window));
    return std::move(builder.k);
}

std::pair<double, double> ScriptedBackend::scores_for(Verdict v, const ScriptedConfig& cfg) {
    double mid = (cfg.logit_hi + cfg.logit_lo) / 2.0;
    switch (v) {
        case Verdict::True: return {cfg.logit_hi, cfg.logit_lo};
        case Verdict::False: return {cfg.logit_lo, cfg.logit_hi};
        case Verdict::Unknown: return {mid, mid};
    }
    return {mid, mid};
}

namespace {

std::string join_messages(const BackendRequest& req) {
    std::string out;
    for (const Message& m : req.messages) {
        if (!out.empty()) out += "\n";
        out += m.text;
    }
    return out;
}

// --- planner ---

enum class Why {
    FetchGo, FetchOpen, Take,
    ApplianceGo, Apply,
    PlaceGo, PlaceOpen, Put,
    ToggleGo, Toggle,
    SearchGo, SearchOpen,
    PutDown, PutDownGo,
    Fallback,
};

struct Decision {
    ActionCommand action;
    Why why = Why::Fallback;
    std::string focus_object;
    std::string focus_recep;
    const Literal* atom = nullptr;
    Verdict atom_verdict = Verdict::Unknown;
};

std::vector<std::string> sorted_roster(const ScriptedKnowledge& k) {
    return {k.roster.begin(), k.roster.end()};
}

bool openable(const std::string& recep) {
    return minihouse::is_openable_kind(minihouse::kind_of_entity(recep));
}

std::optional<Decision> put_down(const ScriptedKnowledge& k) {
    auto held = k.held_object();
    if (!held) return std::nullopt;
    Decision d;
    d.focus_object = *held;
    if (k.at) {
        bool can_put = !openable(*k.at) ||
                       (k.recep_open.count(*k.at) && k.recep_open.at(*k.at));
        if (can_put) {
            d.action = ActionCommand::put(*held, *k.at);
            d.why = Why::PutDown;
            d.focus_recep = *k.at;
            return d;
        }
    }
    for (const std::string& r : sorted_roster(k)) {
        if (!openable(r) && (!k.at || r != *k.at)) {
            d.action = ActionCommand::go_to(r);
            d.why = Why::PutDownGo;
            d.focus_recep = r;
            return d;
        }
    }
    d.action = ActionCommand::go_to("countertop 1");
    d.why = Why::PutDownGo;
    d.focus_recep = "countertop 1";
    return d;
}

Decision fallback_move(const ScriptedKnowledge& k) {
    Decision d;
    d.why = Why::Fallback;
    for (const std::string& r : sorted_roster(k)) {
        if (!k.at || r != *k.at) {
            d.action = ActionCommand::go_to(r);
            d.focus_recep = r;
            return d;
        }
    }
    d.action = ActionCommand::go_to("countertop 1");
    d.focus_recep = "countertop 1";
    return d;
}

Decision search_for(const ScriptedKnowledge& k, const std::string& obj, const Literal* atom) {
    std::vector<std::string> candidates;
    auto add = [&](const std::string& r) {
        if (std::find(candidates.begin(), candidates.end(), r) == candidates.end())
            candidates.push_back(r);
    };
    // Check this object's destination first: cheap re-verification when a
    // completed placement has slid out of the visible window.
    for (const Literal& lit : k.goal) {
        if ((lit.var.kind == VarKind::In || lit.var.kind == VarKind::On) &&
            lit.var.object == obj)
            add(lit.var.recep);
    }
    for (const std::string& r : sorted_roster(k)) add(r);

    const auto ex = k.excluded.find(obj);
    for (const std::string& r : candidates) {
        if (ex != k.excluded.end() && ex->second.count(r)) continue;
        Decision d;
        d.focus_object = obj;
        d.focus_recep = r;
        d.atom = atom;
        if (k.at && *k.at == r) {
            if (openable(r) && k.verdict(Variable::open(r)) != Verdict::True) {
                d.action = ActionCommand::open(r);
                d.why = Why::SearchOpen;
                return d;
            }
            continue;  // standing at it with nothing new to do; try next
        }
        d.action = ActionCommand::go_to(r);
        d.why = Why::SearchGo;
        return d;
    }
    // Every candidate excluded: patrol from the top again.
    Decision d = fallback_move(k);
    d.focus_object = obj;
    d.atom = atom;
    d.why = Why::SearchGo;
    return d;
}

Decision fetch_or_search(const ScriptedKnowledge& k, const std::string& obj,
                         const Literal* atom) {
    auto it = k.object_location.find(obj);
    if (it == k.object_location.end() || it->second == minihouse::kAgentHand)
        return search_for(k, obj, atom);
    const std::string& r = it->second;

    if (auto held = k.held_object(); held && *held != obj) {
        auto d = put_down(k);
        d->atom = atom;
        return *d;
    }
    Decision d;
    d.focus_object = obj;
    d.focus_recep = r;
    d.atom = atom;
    if (!k.at || *k.at != r) {
        d.action = ActionCommand::go_to(r);
        d.why = Why::FetchGo;
        return d;
    }
    if (openable(r) && k.verdict(Variable::open(r)) != Verdict::True) {
        d.action = ActionCommand::open(r);
        d.why = Why::FetchOpen;
        return d;
    }
    d.action = ActionCommand::take(obj, r);
    d.why = Why::Take;
    return d;
}

Decision place(const ScriptedKnowledge& k, const std::string& obj, const std::string& tgt,
               const Literal* atom) {
    Decision d;
    d.focus_object = obj;
    d.focus_recep = tgt;
    d.atom = atom;
    if (!k.at || *k.at != tgt) {
        d.action = ActionCommand::go_to(tgt);
        d.why = Why::PlaceGo;
        return d;
    }
    if (openable(tgt) && k.verdict(Variable::open(tgt)) != Verdict::True) {
        d.action = ActionCommand::open(tgt);
        d.why = Why::PlaceOpen;
        return d;
    }
    d.action = ActionCommand::put(obj, tgt);
    d.why = Why::Put;
    return d;
}

Decision pursue(const ScriptedKnowledge& k, const Literal& atom, Verdict v) {
    const Variable& g = atom.var;
    Decision d;
    switch (g.kind) {
        case VarKind::In:
        case VarKind::On: {
            auto it = k.object_location.find(g.object);
            if (it != k.object_location.end() && it->second == minihouse::kAgentHand)
                d = place(k, g.object, g.recep, &atom);
            else
                d = fetch_or_search(k, g.object, &atom);
            break;
        }
        case VarKind::Attribute: {
            if (g.attr == Attr::Toggled) {
                auto it = k.object_location.find(g.object);
                if (it == k.object_location.end() || it->second == minihouse::kAgentHand) {
                    d = search_for(k, g.object, &atom);
                } else {
                    d.focus_object = g.object;
                    d.focus_recep = it->second;
                    d.atom = &atom;
                    if (!k.at || *k.at != it->second) {
                        d.action = ActionCommand::go_to(it->second);
                        d.why = Why::ToggleGo;
                    } else {
                        d.action = ActionCommand::toggle(g.object, it->second);
                        d.why = Why::Toggle;
                    }
                }
            } else {
                auto it = k.object_location.find(g.object);
                if (it == k.object_location.end())
                    d = fetch_or_search(k, g.object, &atom);
                else if (it->second != minihouse::kAgentHand)
                    d = fetch_or_search(k, g.object, &atom);
                else {
                    std::string app = std::string(minihouse::appliance_kind_for(g.attr)) + " 1";
                    d.focus_object = g.object;
                    d.focus_recep = app;
                    d.atom = &atom;
                    if (!k.at || *k.at != app) {
                        d.action = ActionCommand::go_to(app);
                        d.why = Why::ApplianceGo;
                    } else {
                        switch (g.attr) {
                            case Attr::Clean: d.action = ActionCommand::clean(g.object, app); break;
                            case Attr::Hot: d.action = ActionCommand::heat(g.object, app); break;
                            default: d.action = ActionCommand::cool(g.object, app); break;
                        }
                        d.why = Why::Apply;
                    }
                }
            }
            break;
        }
        case VarKind::Holding:
            d = fetch_or_search(k, g.object, &atom);
            break;
        default:
            d = fallback_move(k);
            break;
    }
    d.atom_verdict = v;
    if (!d.atom) d.atom = &atom;
    return d;
}

Decision plan_next(const ScriptedKnowledge& k) {
    for (const Literal& atom : k.goal) {
        Verdict v = k.verdict(atom.var);
        if (v == Verdict::True) continue;
        return pursue(k, atom, v);
    }
    return fallback_move(k);
}

// --- output text generation ---

std::vector<std::string> unlocated_goal_objects(const ScriptedKnowledge& k) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const Literal& lit : k.goal) {
        const std::string& o = lit.var.object;
        if (o.empty() || seen.count(o)) continue;
        seen.insert(o);
        if (!k.object_location.count(o)) out.push_back(o);
    }
    return out;
}

std::string compact_state_text(const ScriptedKnowledge& k) {
    std::string out;
    auto add = [&](const std::string& s) {
        if (!out.empty()) out += " ";
        out += s;
    };
    if (k.at) add("You are at the " + *k.at + ".");
    if (auto held = k.held_object())
        add("You are holding the " + *held + ".");
    else if (k.hand_empty && *k.hand_empty)
        add("You are holding nothing.");

    std::set<std::string> seen;
    for (const Literal& lit : k.goal) {
        const std::string& o = lit.var.object;
        if (o.empty() || seen.count(o)) continue;
        seen.insert(o);
        auto it = k.object_location.find(o);
        if (it == k.object_location.end())
            add("The location of the " + o + " is unknown.");
        else if (it->second != minihouse::kAgentHand)
            add(location_sentence(o, it->second, true));
    }
    for (const Literal& lit : k.goal) {
        if (lit.var.kind != VarKind::Attribute) continue;
        if (k.verdict(lit.var) == Verdict::True)
            add(literal_sentence({lit.var, true}));
    }
    return out;
}

std::string evu_belief_text(const ScriptedKnowledge& k) {
    std::string out = compact_state_text(k);
    auto add = [&](const std::string& s) {
        if (!out.empty()) out += " ";
        out += s;
    };
    std::set<std::string> relevant;
    for (const Literal& lit : k.goal) {
        if (!lit.var.recep.empty()) relevant.insert(lit.var.recep);
        if (lit.var.kind == VarKind::Attribute && lit.var.attr != Attr::Toggled)
            relevant.insert(std::string(minihouse::appliance_kind_for(lit.var.attr)) + " 1");
    }
    for (const std::string& r : relevant) {
        auto it = k.recep_open.find(r);
        if (it != k.recep_open.end())
            add("The " + r + " is " + (it->second ? "open." : "closed."));
    }
    if (!k.searched.empty())
        add("You have already searched " +
            joined_names({k.searched.begin(), k.searched.end()}) + ".");
    if (!k.roster.empty())
        add("The room contains " + joined_names(sorted_roster(k)) + ".");
    return out;
}

struct Expectation {
    std::string text;
    std::vector<Literal> assertive;
    std::vector<std::pair<std::string, std::string>> hedges;  // (obj, recep)
};

Expectation expectation_for(const ScriptedKnowledge& k) {
    Expectation e;
    if (!k.last_action) {
        e.text = "I expect to see the initial room description.";
        return e;
    }
    const ActionCommand& a = *k.last_action;
    auto hedge_all = [&](const std::string& r) {
        for (const std::string& o : unlocated_goal_objects(k)) {
            e.text += " The " + o + " may or may not be " + std::string(prep_for(r)) +
                      " the " + r + ".";
            e.hedges.emplace_back(o, r);
        }
    };
    auto assert_lit = [&](const Literal& lit) {
        std::string sentence = literal_sentence(lit);
        sentence[0] = static_cast<char>(std::tolower(sentence[0]));
        e.text += "I expect that " + sentence;
        e.assertive.push_back(lit);
    };
    switch (a.verb) {
        case Verb::GoTo:
            e.text = "I expect to arrive at the " + a.arg1 + ".";
            hedge_all(a.arg1);
            break;
        case Verb::Open:
            assert_lit({Variable::open(a.arg1), true});
            hedge_all(a.arg1);
            break;
        case Verb::Close:
            assert_lit({Variable::open(a.arg1), false});
            break;
        case Verb::Take:
            assert_lit({Variable::holding(a.arg1), true});
            break;
        case Verb::Put: {
            bool surface = !openable(a.arg2);
            assert_lit({surface ? Variable::on(a.arg1, a.arg2) : Variable::in(a.arg1, a.arg2),
                        true});
            break;
        }
        case Verb::Clean: assert_lit({Variable::attribute(a.arg1, Attr::Clean), true}); break;
        case Verb::Heat: assert_lit({Variable::attribute(a.arg1, Attr::Hot), true}); break;
        case Verb::Cool: assert_lit({Variable::attribute(a.arg1, Attr::Cold), true}); break;
        case Verb::Toggle: assert_lit({Variable::attribute(a.arg1, Attr::Toggled), true}); break;
    }
    return e;
}

bool obs_has(const std::vector<Literal>& obs, const Literal& lit) {
    for (const Literal& l : obs) {
        if (l.truth == lit.truth &&
            l.var.location_normalized() == lit.var.location_normalized())
            return true;
    }
    return false;
}

std::string verification_text(const ScriptedKnowledge& k, const Expectation& e,
                              const std::vector<Literal>& obs_literals) {
    if (k.last_observation_text &&
        trim(*k.last_observation_text) == minihouse::kNothingHappened)
        return "The action failed; nothing happened.";

    std::string out;
    auto add = [&](const std::string& s) {
        if (!out.empty()) out += " ";
        out += s;
    };
    std::set<std::string> covered;
    for (const Literal& lit : e.assertive) {
        covered.insert(lit.var.location_normalized().canonical());
        if (obs_has(obs_literals, lit)) {
            add("Confirmed: " + literal_sentence(lit));
        } else if (obs_has(obs_literals, {lit.var, !lit.truth})) {
            add("Contradicted: " + literal_sentence({lit.var, !lit.truth}));
        }
    }
    for (const auto& [obj, recep] : e.hedges) {
        Literal pos{openable(recep) ? Variable::in(obj, recep) : Variable::on(obj, recep), true};
        covered.insert(pos.var.location_normalized().canonical());
        if (obs_has(obs_literals, pos)) add("Surprise: " + literal_sentence(pos));
    }
    std::set<std::string> goal_objs;
    for (const Literal& lit : k.goal)
        if (!lit.var.object.empty()) goal_objs.insert(lit.var.object);
    for (const Literal& lit : obs_literals) {
        if (!lit.truth || lit.var.object.empty() || !goal_objs.count(lit.var.object)) continue;
        if (covered.count(lit.var.location_normalized().canonical())) continue;
        add("Surprise: " + literal_sentence(lit));
    }
    if (out.empty()) out = "The observation matches the expectation.";
    return out;
}

std::string thought_text(const ScriptedKnowledge& k, const Decision& d, NeglectMode mode) {
    std::string out;
    auto add = [&](const std::string& s) {
        if (!out.empty()) out += " ";
        out += s;
    };
    auto unlocated = unlocated_goal_objects(k);
    if (mode == NeglectMode::ForcedNeglect && !unlocated.empty()) {
        const std::string& o = unlocated.front();
        if (k.last_enumerated_recep)
            add(location_sentence(o, *k.last_enumerated_recep, false));
        add("I still need to find the " + o + ".");
        add("Next, I will " + render_action(d.action) + ".");
        return out;
    }

    if (d.atom && d.atom_verdict == Verdict::False) add(literal_sentence({d.atom->var, false}));
    switch (d.why) {
        case Why::FetchGo:
        case Why::FetchOpen:
        case Why::Take:
            add(location_sentence(d.focus_object, d.focus_recep, true));
            break;
        case Why::SearchGo:
        case Why::SearchOpen:
            add("The location of the " + d.focus_object + " is unknown.");
            break;
        case Why::ApplianceGo:
        case Why::Apply:
        case Why::PlaceGo:
        case Why::PlaceOpen:
        case Why::Put:
            add("You are holding the " + d.focus_object + ".");
            break;
        case Why::ToggleGo:
        case Why::Toggle:
            add(location_sentence(d.focus_object, d.focus_recep, true));
            break;
        case Why::PutDown:
        case Why::PutDownGo:
            add("I need a free hand, so I will set down the " + d.focus_object + ".");
            break;
        case Why::Fallback:
            add("All goal conditions appear satisfied.");
            break;
    }
    add("Next, I will " + render_action(d.action) + ".");
    return out;
}

enum class VariantStyle { DBI, OBI, ReflAct, VAGEN };

std::string variant_belief_text(const ScriptedKnowledge& k, const Decision& d,
                                VariantStyle style) {
    switch (style) {
        case VariantStyle::DBI:
            return compact_state_text(k);
        case VariantStyle::OBI: {
            std::string obs = k.last_observation_text ? *k.last_observation_text : "(none)";
            return "Observation: " + obs + " State: " + compact_state_text(k);
        }
        case VariantStyle::ReflAct: {
            int total = static_cast<int>(k.goal.size());
            int done = 0;
            std::vector<Literal> remaining;
            for (const Literal& lit : k.goal) {
                if (k.verdict(lit.var) == Verdict::True)
                    ++done;
                else
                    remaining.push_back(lit);
            }
            std::string out = "Progress: " + std::to_string(done) + " of " +
                              std::to_string(total) + " goal conditions are satisfied.";
            if (!remaining.empty())
                out += " Remaining: " + minihouse::render_instruction(remaining) + ".";
            return out;
        }
        case VariantStyle::VAGEN: {
            Expectation next;
            // Predict the outcome of the action about to be taken.
            ScriptedKnowledge peek = k;
            peek.last_action = d.action;
            next = expectation_for(peek);
            std::string predicted = next.text;
            return "Current State: " + compact_state_text(k) +
                   " Hypothetical Action: " + render_action(d.action) + "." +
                   " Predicted Future State: " + predicted;
        }
    }
    return {};
}

std::vector<std::string> format_labels(const std::string& prompt) {
    std::vector<std::string> labels;
    size_t marker = prompt.find("Your response should use the following format:");
    if (marker == std::string::npos) return labels;
    size_t start = prompt.find('\n', marker);
    if (start == std::string::npos) return labels;
    ++start;
    while (start < prompt.size()) {
        size_t end = prompt.find('\n', start);
        if (end == std::string::npos) end = prompt.size();
        std::string_view raw = trim(std::string_view(prompt).substr(start, end - start));
        start = end + 1;
        if (raw.empty()) {
            if (labels.empty()) continue;
            break;
        }
        auto colon = raw.find(": <");
        if (colon == std::string_view::npos) break;
        labels.emplace_back(raw.substr(0, colon));
    }
    return labels;
}

}  // namespace

BackendResponse ScriptedBackend::generate(const BackendRequest& req) {
    if (req.mode != Mode::Generate)
        throw ContractError("generate called with a non-Generate request");
    if (req.messages.empty()) throw ContractError("generate called with no messages");

    const std::string prompt = join_messages(req);
    std::vector<std::string> labels = format_labels(prompt);
    if (labels.empty())
        throw FormatError("scripted backend: prompt has no recognizable response format block");

    Builder builder(cfg_);
    builder.run(apply_window(parse_prompt_lines(prompt), cfg_.context_window));
    if (builder.k.goal.empty())
        throw FormatError("scripted backend: prompt has no parseable task goal line");
    const ScriptedKnowledge& k = builder.k;

    std::string prompt_lower = lower(prompt);
    VariantStyle style = VariantStyle::DBI;
    if (prompt_lower.find("reiterate the most recent observation") != std::string::npos)
        style = VariantStyle::OBI;
    else if (prompt_lower.find("hypothetical action") != std::string::npos)
        style = VariantStyle::VAGEN;
    else if (prompt_lower.find("progress relative to the goal") != std::string::npos)
        style = VariantStyle::ReflAct;

    std::optional<Decision> decision;
    auto decide = [&]() -> const Decision& {
        if (!decision) decision = plan_next(k);
        return *decision;
    };

    std::optional<Expectation> expectation;
    auto expect = [&]() -> const Expectation& {
        if (!expectation) expectation = expectation_for(k);
        return *expectation;
    };

    std::string out;
    for (const std::string& label : labels) {
        std::string body;
        if (label == "Action") {
            body = render_action(decide().action);
        } else if (label == "Thought") {
            body = thought_text(k, decide(), cfg_.neglect_mode);
        } else if (label == "Belief State") {
            body = evu_belief_text(k);
        } else if (label == "Belief") {
            body = variant_belief_text(k, decide(), style);
        } else if (label == "Reason") {
            std::string echo = k.last_observation_text
                                   ? " I observed: " + *k.last_observation_text
                                   : "";
            body = expect().text + echo + " " +
                   verification_text(k, expect(), builder.last_obs_literals);
        } else if (label == "Estimate") {
            body = expect().text;
        } else if (label == "Verification") {
            Expectation e;
            e.assertive = builder.expected;
            e.hedges = builder.hedged;
            body = verification_text(k, e, builder.last_obs_literals);
        } else if (label == "Reflection") {
            int idx = 1;
            size_t pos = 0;
            while ((pos = prompt.find("Reflection: ", pos)) != std::string::npos) {
                ++idx;
                pos += 12;
            }
            body = "On reflection " + std::to_string(idx) +
                   ", I re-checked the last observation against my assumptions and my plan "
                   "still stands.";
        } else {
            throw FormatError("scripted backend: unrecognized output label: " + label);
        }
        if (!out.empty()) out += "\n";
        out += label + ": " + body;
    }

    BackendResponse resp;
    resp.text = std::move(out);
    resp.usage.input_tokens = count_prompt_words(req);
    resp.usage.output_tokens = count_words(resp.text);
    resp.latency_ms = 0.0;
    return resp;
}

BackendResponse ScriptedBackend::score_candidates(const BackendRequest& req) {
    if (req.mode != Mode::ScoreCandidates)
        throw ContractError("score_candidates called with a non-ScoreCandidates request");
    if (req.candidates.empty())
        throw ContractError("score_candidates called with an empty candidate list");
    if (req.messages.empty()) throw ContractError("score_candidates called with no messages");

    const std::string prompt = join_messages(req);

    // The probe question is the last non-empty line; everything before it
    // is the context.
    size_t q_start = prompt.find_last_not_of(" \n");
    size_t line_start = prompt.rfind('\n', q_start);
    std::string question(trim(std::string_view(prompt).substr(
        line_start == std::string::npos ? 0 : line_start + 1)));

    Verdict verdict = Verdict::Unknown;
    if (auto var = minihouse::variable_from_question(question)) {
        Builder builder(cfg_);
        builder.run(apply_window(parse_prompt_lines(prompt), cfg_.context_window));
        verdict = builder.k.verdict(*var);
    }

    auto [yes_score, no_score] = scores_for(verdict, cfg_);
    double mid = (cfg_.logit_hi + cfg_.logit_lo) / 2.0;

    BackendResponse resp;
    for (const std::string& c : req.candidates) {
        std::string cl = lower(c);
        resp.candidate_scores[c] = cl == "yes" ? yes_score : cl == "no" ? no_score : mid;
    }
    resp.usage.input_tokens = count_prompt_words(req);
    resp.usage.output_tokens = 0;
    resp.latency_ms = 0.0;
    return resp;
}

std::string_view to_string(Role r) {
    switch (r) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "?";
}

std::int64_t count_words(std::string_view text) {
    std::int64_t n = 0;
    bool in_word = false;
    for (char c : text) {
        bool space = std::isspace(static_cast<unsigned char>(c));
        if (!space && !in_word) ++n;
        in_word = !space;
    }
    return n;
}

std::int64_t count_prompt_words(const BackendRequest& req) {
    std::int64_t n = 0;
    for (const Message& m : req.messages) n += count_words(m.text);
    return n;
}

}  // namespace evu::backend
