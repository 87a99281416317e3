#include "evu/minihouse/variable.hpp"

#include "evu/errors.hpp"

namespace evu::minihouse {

std::string_view to_string(VarKind k) {
    switch (k) {
        case VarKind::Holding: return "Holding";
        case VarKind::In: return "In";
        case VarKind::On: return "On";
        case VarKind::Open: return "Open";
        case VarKind::Attribute: return "Attribute";
        case VarKind::At: return "At";
    }
    return "?";
}

std::string_view to_string(Attr a) {
    switch (a) {
        case Attr::Clean: return "clean";
        case Attr::Hot: return "hot";
        case Attr::Cold: return "cold";
        case Attr::Toggled: return "toggled";
    }
    return "?";
}

std::optional<VarKind> var_kind_from_string(std::string_view s) {
    if (s == "Holding") return VarKind::Holding;
    if (s == "In") return VarKind::In;
    if (s == "On") return VarKind::On;
    if (s == "Open") return VarKind::Open;
    if (s == "Attribute") return VarKind::Attribute;
    if (s == "At") return VarKind::At;
    return std::nullopt;
}

std::optional<Attr> attr_from_string(std::string_view s) {
    if (s == "clean") return Attr::Clean;
    if (s == "hot") return Attr::Hot;
    if (s == "cold") return Attr::Cold;
    if (s == "toggled") return Attr::Toggled;
    return std::nullopt;
}

Variable Variable::holding(std::string obj) {
    return Variable{VarKind::Holding, std::move(obj), "", Attr::Clean};
}
Variable Variable::in(std::string obj, std::string recep) {
    return Variable{VarKind::In, std::move(obj), std::move(recep), Attr::Clean};
}
Variable Variable::on(std::string obj, std::string recep) {
    return Variable{VarKind::On, std::move(obj), std::move(recep), Attr::Clean};
}
Variable Variable::open(std::string recep) {
    return Variable{VarKind::Open, "", std::move(recep), Attr::Clean};
}
Variable Variable::attribute(std::string obj, Attr a) {
    return Variable{VarKind::Attribute, std::move(obj), "", a};
}
Variable Variable::at(std::string recep) {
    return Variable{VarKind::At, "", std::move(recep), Attr::Clean};
}

std::string Variable::canonical() const {
    std::string out{to_string(kind)};
    out += '(';
    switch (kind) {
        case VarKind::Holding:
            out += object;
            break;
        case VarKind::In:
        case VarKind::On:
            out += object;
            out += ", ";
            out += recep;
            break;
        case VarKind::Open:
        case VarKind::At:
            out += recep;
            break;
        case VarKind::Attribute:
            out += object;
            out += ", ";
            out += to_string(attr);
            break;
    }
    out += ')';
    return out;
}

std::optional<Variable> Variable::parse(std::string_view text) {
    auto lparen = text.find('(');
    if (lparen == std::string_view::npos || text.back() != ')') return std::nullopt;
    auto kind = var_kind_from_string(text.substr(0, lparen));
    if (!kind) return std::nullopt;
    std::string_view args = text.substr(lparen + 1, text.size() - lparen - 2);

    auto comma = args.find(", ");
    std::string_view first = comma == std::string_view::npos ? args : args.substr(0, comma);
    std::string_view second = comma == std::string_view::npos
                                  ? std::string_view{}
                                  : args.substr(comma + 2);

    switch (*kind) {
        case VarKind::Holding:
            if (first.empty() || !second.empty()) return std::nullopt;
            return holding(std::string(first));
        case VarKind::In:
            if (first.empty() || second.empty()) return std::nullopt;
            return in(std::string(first), std::string(second));
        case VarKind::On:
            if (first.empty() || second.empty()) return std::nullopt;
            return on(std::string(first), std::string(second));
        case VarKind::Open:
            if (first.empty() || !second.empty()) return std::nullopt;
            return open(std::string(first));
        case VarKind::At:
            if (first.empty() || !second.empty()) return std::nullopt;
            return at(std::string(first));
        case VarKind::Attribute: {
            auto a = attr_from_string(second);
            if (first.empty() || !a) return std::nullopt;
            return attribute(std::string(first), *a);
        }
    }
    return std::nullopt;
}

Variable Variable::location_normalized() const {
    Variable v = *this;
    if (v.kind == VarKind::On) v.kind = VarKind::In;
    return v;
}

std::string Literal::canonical() const {
    return truth ? var.canonical() : "!" + var.canonical();
}

std::optional<Literal> Literal::parse(std::string_view text) {
    bool truth = true;
    if (!text.empty() && text.front() == '!') {
        truth = false;
        text.remove_prefix(1);
    }
    auto v = Variable::parse(text);
    if (!v) return std::nullopt;
    return Literal{*v, truth};
}

std::string question_for_variable(const Variable& v) {
    switch (v.kind) {
        case VarKind::Holding:
            return "Are you currently holding the " + v.object + "?";
        case VarKind::In:
            return "Is the " + v.object + " currently in the " + v.recep + "?";
        case VarKind::On:
            return "Is the " + v.object + " currently on the " + v.recep + "?";
        case VarKind::Open:
            return "Is the " + v.recep + " currently open?";
        case VarKind::Attribute:
            if (v.attr == Attr::Toggled)
                return "Is the " + v.object + " currently turned on?";
            return "Is the " + v.object + " currently " + std::string(to_string(v.attr)) + "?";
        case VarKind::At:
            throw SchemaError("no probe question for " + v.canonical());
    }
    throw SchemaError("malformed variable");
}

std::optional<Variable> variable_from_question(std::string_view text) {
    auto strip = [](std::string_view s, std::string_view prefix) -> std::optional<std::string_view> {
        if (s.size() > prefix.size() && s.compare(0, prefix.size(), prefix) == 0)
            return s.substr(prefix.size());
        return std::nullopt;
    };
    while (!text.empty() && (text.back() == '?' || text.back() == ' ')) text.remove_suffix(1);
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);

    if (auto rest = strip(text, "Are you currently holding the ")) {
        return Variable::holding(std::string(*rest));
    }
    if (auto rest = strip(text, "Is the ")) {
        std::string_view r = *rest;
        if (auto pos = r.find(" currently in the "); pos != std::string_view::npos)
            return Variable::in(std::string(r.substr(0, pos)), std::string(r.substr(pos + 18)));
        if (auto pos = r.find(" currently on the "); pos != std::string_view::npos)
            return Variable::on(std::string(r.substr(0, pos)), std::string(r.substr(pos + 18)));
        if (r.size() > 15 && r.substr(r.size() - 15) == " currently open")
            return Variable::open(std::string(r.substr(0, r.size() - 15)));
        if (r.size() > 20 && r.substr(r.size() - 20) == " currently turned on")
            return Variable::attribute(std::string(r.substr(0, r.size() - 20)), Attr::Toggled);
        for (Attr a : {Attr::Clean, Attr::Hot, Attr::Cold}) {
            std::string suffix = " currently " + std::string(to_string(a));
            if (r.size() > suffix.size() && r.substr(r.size() - suffix.size()) == suffix)
                return Variable::attribute(std::string(r.substr(0, r.size() - suffix.size())), a);
        }
    }
    return std::nullopt;
}

}  // namespace evu::minihouse
