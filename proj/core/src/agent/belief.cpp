#include "evu/agent/belief.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <vector>

namespace evu::agent {

using minihouse::Attr;
using minihouse::Literal;
using minihouse::LiteralSet;
using minihouse::Variable;

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

std::optional<Literal> match_sentence(std::string_view sentence) {
    std::string s = lower(trim(sentence));
    if (s.empty()) return std::nullopt;

    auto strip = [&](std::string_view prefix) -> std::optional<std::string> {
        if (s.size() > prefix.size() && s.compare(0, prefix.size(), prefix) == 0)
            return s.substr(prefix.size());
        return std::nullopt;
    };

    if (auto rest = strip("you are holding the "))
        return Literal{Variable::holding(*rest), true};
    if (auto rest = strip("you are not holding the "))
        return Literal{Variable::holding(*rest), false};
    if (auto rest = strip("you are at the "))
        return Literal{Variable::at(*rest), true};

    if (auto rest = strip("the ")) {
        const std::string& r = *rest;
        auto is_pos = r.find(" is ");
        if (is_pos == std::string::npos) return std::nullopt;
        std::string entity = r.substr(0, is_pos);
        std::string pred = r.substr(is_pos + 4);
        if (entity.empty() || pred.empty()) return std::nullopt;

        bool truth = true;
        if (pred.rfind("not ", 0) == 0) {
            truth = false;
            pred = pred.substr(4);
        }

        if (pred.rfind("in the ", 0) == 0)
            return Literal{Variable::in(entity, pred.substr(7)), truth};
        if (pred.rfind("on the ", 0) == 0)
            return Literal{Variable::on(entity, pred.substr(7)), truth};
        if (pred == "open") return Literal{Variable::open(entity), truth};
        if (pred == "closed") return Literal{Variable::open(entity), !truth};
        if (pred == "turned on")
            return Literal{Variable::attribute(entity, Attr::Toggled), truth};
        if (pred == "turned off")
            return Literal{Variable::attribute(entity, Attr::Toggled), !truth};
        if (auto attr = minihouse::attr_from_string(pred))
            return Literal{Variable::attribute(entity, *attr), truth};
    }
    return std::nullopt;
}

}  // namespace

LiteralSet extract_belief_facts(std::string_view text) {
    LiteralSet out;
    size_t start = 0;
    while (start < text.size()) {
        size_t end = text.find('.', start);
        if (end == std::string_view::npos) end = text.size();
        if (auto lit = match_sentence(text.substr(start, end - start))) out.insert(*lit);
        start = end + 1;
    }
    return out;
}

BeliefState make_belief(std::string text, int turn) {
    BeliefState b;
    b.facts = extract_belief_facts(text);
    b.text = std::move(text);
    b.turn = turn;
    return b;
}

std::string render_initial_belief(const std::string& start_recep) {
    return "You are at the " + start_recep +
           ". You are holding nothing. Goal-relevant objects not yet located.";
}

}  // namespace evu::agent
