#include <algorithm>
#include <cctype>

#include "evu/agent/agent.hpp"

namespace evu::agent {

namespace {

const std::vector<std::string>& known_labels() {
    static const std::vector<std::string> labels = {
        "Belief State", "Verification", "Reflection", "Estimate",
        "Reason",       "Belief",       "Thought",    "Action",
    };
    return labels;
}

std::vector<std::string> required_labels(const Strategy& strategy) {
    switch (strategy.kind) {
        case StrategyKind::NoThinking:
        case StrategyKind::PlanAndAct:
            return {"Action"};
        case StrategyKind::ReAct:
        case StrategyKind::NoneBI:
        case StrategyKind::MultipleReflection:
            return {"Thought", "Action"};
        case StrategyKind::DBI:
        case StrategyKind::OBI:
        case StrategyKind::ReflAct:
        case StrategyKind::VAGEN:
            return {"Belief", "Thought", "Action"};
        case StrategyKind::EVU:
            if (strategy.evu_mode == EvuMode::ThreeCall)
                return {"Belief State", "Thought", "Action"};
            return {"Reason", "Belief State", "Thought", "Action"};
    }
    return {"Action"};
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
               return std::tolower(x) == std::tolower(y);
           });
}

// If the line starts a labeled field, returns (canonical label, body).
std::optional<std::pair<std::string, std::string>> match_label_line(std::string_view line) {
    auto colon = line.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    std::string_view head = trim(line.substr(0, colon));
    for (const std::string& label : known_labels()) {
        if (iequals(head, label))
            return std::make_pair(label, std::string(trim(line.substr(colon + 1))));
    }
    return std::nullopt;
}

}  // namespace

ParsedOutput parse_structured_output(std::string_view text, const Strategy& strategy) {
    ParsedOutput out;

    std::optional<std::string> current;
    size_t start = 0;
    bool duplicate = false;
    std::string duplicate_label;
    while (start <= text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = trim(text.substr(start, end - start));
        start = end + 1;

        if (auto field = match_label_line(line)) {
            if (out.fields.count(field->first)) {
                duplicate = true;
                duplicate_label = field->first;
            }
            current = field->first;
            out.fields[*current] = field->second;
        } else if (current && !line.empty()) {
            std::string& body = out.fields[*current];
            if (!body.empty()) body += "\n";
            body += std::string(line);
        }
        if (end == text.size()) break;
    }

    if (auto it = out.fields.find("Action"); it != out.fields.end()) out.action_text = it->second;

    if (duplicate) {
        out.error = "ambiguous output: duplicate label: " + duplicate_label;
        return out;
    }

    std::string missing;
    for (const std::string& label : required_labels(strategy)) {
        if (!out.fields.count(label)) {
            if (!missing.empty()) missing += ", ";
            missing += label;
        }
    }
    if (!missing.empty()) {
        out.error = "missing required labels: " + missing;
        return out;
    }
    out.ok = true;
    return out;
}

}  // namespace evu::agent
