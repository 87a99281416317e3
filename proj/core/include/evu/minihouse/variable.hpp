#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace evu::minihouse {

/// Predicate kinds over the household schema. Probes are restricted to
/// the first five; At is used internally for belief/oracle rendering.
enum class VarKind { Holding, In, On, Open, Attribute, At };

enum class Attr { Clean, Hot, Cold, Toggled };

std::string_view to_string(VarKind k);
std::string_view to_string(Attr a);
std::optional<VarKind> var_kind_from_string(std::string_view s);
std::optional<Attr> attr_from_string(std::string_view s);

/// A ground environment variable, e.g. In(apple 1, fridge 1).
struct Variable {
    VarKind kind = VarKind::In;
    std::string object;  // empty for Open/At
    std::string recep;   // empty for Holding/Attribute
    Attr attr = Attr::Clean;

    auto operator<=>(const Variable&) const = default;

    static Variable holding(std::string obj);
    static Variable in(std::string obj, std::string recep);
    static Variable on(std::string obj, std::string recep);
    static Variable open(std::string recep);
    static Variable attribute(std::string obj, Attr a);
    static Variable at(std::string recep);

    /// Canonical text form, e.g. "In(apple 1, fridge 1)",
    /// "Attribute(apple 1, clean)". Parseable by Variable::parse.
    std::string canonical() const;
    static std::optional<Variable> parse(std::string_view text);

    /// In and On differ only in surface phrasing; both assert the object's
    /// location. Returns a copy with On rewritten to In for set comparisons.
    Variable location_normalized() const;
};

/// A signed predicate: the variable plus its asserted truth value.
struct Literal {
    Variable var;
    bool truth = true;

    auto operator<=>(const Literal&) const = default;

    /// "In(apple 1, fridge 1)" or "!In(apple 1, fridge 1)".
    std::string canonical() const;
    static std::optional<Literal> parse(std::string_view text);
};

using LiteralSet = std::set<Literal>;

/// Fixed yes-no question template per predicate kind, injective over the
/// probe schema (Holding/In/On/Open/Attribute). Throws SchemaError for At.
std::string question_for_variable(const Variable& v);

/// Inverse of question_for_variable.
std::optional<Variable> variable_from_question(std::string_view text);

}  // namespace evu::minihouse
