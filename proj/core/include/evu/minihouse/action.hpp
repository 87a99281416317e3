#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace evu::minihouse {

enum class Verb { GoTo, Take, Put, Open, Close, Toggle, Clean, Heat, Cool };

std::string_view to_string(Verb v);

/// A parsed household action. The surface grammar is the nine forms of
/// the ALFWorld-style action list:
///
///   go to (recep)
///   take (obj) from (recep)
///   put (obj) in/on (recep)
///   open (recep)
///   close (recep)
///   toggle (obj) (recep)
///   clean (obj) with (recep)
///   heat (obj) with (recep)
///   cool (obj) with (recep)
///
/// arg1 is the object for object-taking verbs and the receptacle for
/// GoTo/Open/Close; arg2 is the receptacle where present.
struct ActionCommand {
    Verb verb = Verb::GoTo;
    std::string arg1;
    std::string arg2;

    auto operator<=>(const ActionCommand&) const = default;

    static ActionCommand go_to(std::string recep);
    static ActionCommand take(std::string obj, std::string recep);
    static ActionCommand put(std::string obj, std::string recep);
    static ActionCommand open(std::string recep);
    static ActionCommand close(std::string recep);
    static ActionCommand toggle(std::string obj, std::string recep);
    static ActionCommand clean(std::string obj, std::string recep);
    static ActionCommand heat(std::string obj, std::string recep);
    static ActionCommand cool(std::string obj, std::string recep);

    /// The object argument, if the verb takes one.
    std::string_view object() const;
    /// The receptacle argument.
    std::string_view receptacle() const;
};

/// Renders the canonical surface form, e.g. "take apple 1 from fridge 1".
std::string render_action(const ActionCommand& a);

/// Parses an action line. Tolerates surrounding whitespace, a trailing
/// period, and the put-preposition variants "in", "on", "in/on".
/// Returns nullopt for text outside the grammar.
std::optional<ActionCommand> parse_action(std::string_view text);

/// The action list exactly as it appears in the prompt templates.
std::string_view action_grammar_text();

}  // namespace evu::minihouse
