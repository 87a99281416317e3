#include "evu/minihouse/action.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace evu::minihouse {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

// Splits "apple 1 from fridge 1" on the separator word " from ".
std::optional<std::pair<std::string, std::string>> split_on_word(std::string_view s,
                                                                 std::string_view word) {
    std::string sep = " " + std::string(word) + " ";
    auto pos = s.find(sep);
    if (pos == std::string_view::npos) return std::nullopt;
    std::string_view a = trim(s.substr(0, pos));
    std::string_view b = trim(s.substr(pos + sep.size()));
    if (a.empty() || b.empty()) return std::nullopt;
    return std::make_pair(std::string(a), std::string(b));
}

bool is_number(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isdigit(c);
    });
}

// "desklamp 1 desk 1" -> ("desklamp 1", "desk 1"). Entity names end with
// their numeric index, which is what makes the juxtaposed form parseable.
std::optional<std::pair<std::string, std::string>> split_two_entities(std::string_view s) {
    std::vector<std::string> tokens;
    size_t start = 0;
    while (start < s.size()) {
        auto sp = s.find(' ', start);
        if (sp == std::string_view::npos) sp = s.size();
        if (sp > start) tokens.emplace_back(s.substr(start, sp - start));
        start = sp + 1;
    }
    for (size_t i = 0; i + 1 < tokens.size(); ++i) {
        if (is_number(tokens[i]) && !is_number(tokens[i + 1])) {
            std::string a, b;
            for (size_t j = 0; j <= i; ++j) a += (j ? " " : "") + tokens[j];
            for (size_t j = i + 1; j < tokens.size(); ++j)
                b += (j > i + 1 ? " " : "") + tokens[j];
            if (a.empty() || b.empty()) return std::nullopt;
            return std::make_pair(a, b);
        }
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(Verb v) {
    switch (v) {
        case Verb::GoTo: return "go to";
        case Verb::Take: return "take";
        case Verb::Put: return "put";
        case Verb::Open: return "open";
        case Verb::Close: return "close";
        case Verb::Toggle: return "toggle";
        case Verb::Clean: return "clean";
        case Verb::Heat: return "heat";
        case Verb::Cool: return "cool";
    }
    return "?";
}

ActionCommand ActionCommand::go_to(std::string recep) { return {Verb::GoTo, std::move(recep), ""}; }
ActionCommand ActionCommand::take(std::string obj, std::string recep) {
    return {Verb::Take, std::move(obj), std::move(recep)};
}
ActionCommand ActionCommand::put(std::string obj, std::string recep) {
    return {Verb::Put, std::move(obj), std::move(recep)};
}
ActionCommand ActionCommand::open(std::string recep) { return {Verb::Open, std::move(recep), ""}; }
ActionCommand ActionCommand::close(std::string recep) { return {Verb::Close, std::move(recep), ""}; }
ActionCommand ActionCommand::toggle(std::string obj, std::string recep) {
    return {Verb::Toggle, std::move(obj), std::move(recep)};
}
ActionCommand ActionCommand::clean(std::string obj, std::string recep) {
    return {Verb::Clean, std::move(obj), std::move(recep)};
}
ActionCommand ActionCommand::heat(std::string obj, std::string recep) {
    return {Verb::Heat, std::move(obj), std::move(recep)};
}
ActionCommand ActionCommand::cool(std::string obj, std::string recep) {
    return {Verb::Cool, std::move(obj), std::move(recep)};
}

std::string_view ActionCommand::object() const {
    switch (verb) {
        case Verb::GoTo:
        case Verb::Open:
        case Verb::Close:
            return {};
        default:
            return arg1;
    }
}

std::string_view ActionCommand::receptacle() const {
    switch (verb) {
        case Verb::GoTo:
        case Verb::Open:
        case Verb::Close:
            return arg1;
        default:
            return arg2;
    }
}

std::string render_action(const ActionCommand& a) {
    switch (a.verb) {
        case Verb::GoTo: return "go to " + a.arg1;
        case Verb::Take: return "take " + a.arg1 + " from " + a.arg2;
        case Verb::Put: return "put " + a.arg1 + " in/on " + a.arg2;
        case Verb::Open: return "open " + a.arg1;
        case Verb::Close: return "close " + a.arg1;
        case Verb::Toggle: return "toggle " + a.arg1 + " " + a.arg2;
        case Verb::Clean: return "clean " + a.arg1 + " with " + a.arg2;
        case Verb::Heat: return "heat " + a.arg1 + " with " + a.arg2;
        case Verb::Cool: return "cool " + a.arg1 + " with " + a.arg2;
    }
    return {};
}

std::optional<ActionCommand> parse_action(std::string_view text) {
    std::string s = lower(trim(text));
    if (!s.empty() && s.back() == '.') s.pop_back();
    s = std::string(trim(s));
    if (s.empty()) return std::nullopt;

    auto starts = [&](std::string_view prefix) {
        return s.size() > prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
    };

    if (starts("go to ")) {
        std::string r(trim(std::string_view(s).substr(6)));
        if (r.empty()) return std::nullopt;
        return ActionCommand::go_to(r);
    }
    // "task ... from ..." appears in one published variant of the action
    // list; accept it as a synonym of take.
    if (starts("take ") || starts("task ")) {
        auto parts = split_on_word(std::string_view(s).substr(5), "from");
        if (!parts) return std::nullopt;
        return ActionCommand::take(parts->first, parts->second);
    }
    if (starts("put ")) {
        std::string_view rest = std::string_view(s).substr(4);
        for (std::string_view prep : {"in/on", "in", "on"}) {
            if (auto parts = split_on_word(rest, prep))
                return ActionCommand::put(parts->first, parts->second);
        }
        return std::nullopt;
    }
    if (starts("open ")) {
        std::string r(trim(std::string_view(s).substr(5)));
        if (r.empty()) return std::nullopt;
        return ActionCommand::open(r);
    }
    if (starts("close ")) {
        std::string r(trim(std::string_view(s).substr(6)));
        if (r.empty()) return std::nullopt;
        return ActionCommand::close(r);
    }
    if (starts("toggle ")) {
        auto parts = split_two_entities(std::string_view(s).substr(7));
        if (!parts) return std::nullopt;
        return ActionCommand::toggle(parts->first, parts->second);
    }
    if (starts("clean ")) {
        auto parts = split_on_word(std::string_view(s).substr(6), "with");
        if (!parts) return std::nullopt;
        return ActionCommand::clean(parts->first, parts->second);
    }
    if (starts("heat ")) {
        auto parts = split_on_word(std::string_view(s).substr(5), "with");
        if (!parts) return std::nullopt;
        return ActionCommand::heat(parts->first, parts->second);
    }
    if (starts("cool ")) {
        auto parts = split_on_word(std::string_view(s).substr(5), "with");
        if (!parts) return std::nullopt;
        return ActionCommand::cool(parts->first, parts->second);
    }
    return std::nullopt;
}

std::string_view action_grammar_text() {
    return
        "1. go to (recep)\n"
        "2. take (obj) from (recep)\n"
        "3. put (obj) in/on (recep)\n"
        "4. open (recep)\n"
        "5. close (recep)\n"
        "6. toggle (obj) (recep)\n"
        "7. clean (obj) with (recep)\n"
        "8. heat (obj) with (recep)\n"
        "9. cool (obj) with (recep)\n"
        "where (obj) and (recep) correspond to objects and receptacles.";
}

}  // namespace evu::minihouse
