#pragma once

#include <string>
#include <string_view>

#include "evu/minihouse/variable.hpp"

namespace evu::agent {

/// The explicit natural-language belief B_t plus the ground predicates
/// extractable from it.
struct BeliefState {
    std::string text;
    minihouse::LiteralSet facts;
    int turn = 0;

    bool operator==(const BeliefState&) const = default;
};

/// Deterministic pattern extraction over the documented belief phrasing.
/// Recognized sentence forms (case-insensitive, trailing period optional):
///
///   You are holding the {obj}.            You are not holding the {obj}.
///   You are at the {recep}.
///   The {obj} is in|on the {recep}.       The {obj} is not in|on the {recep}.
///   The {recep} is open.                  The {recep} is closed.
///   The {obj} is clean|hot|cold.          The {obj} is not clean|hot|cold.
///   The {obj} is turned on.               The {obj} is turned off.
///
/// Unrecognized sentences are ignored, never guessed.
minihouse::LiteralSet extract_belief_facts(std::string_view text);

/// Builds a BeliefState from text (runs the extractor).
BeliefState make_belief(std::string text, int turn);

/// The fixed initial belief B_0 for a task starting at `start_recep`.
std::string render_initial_belief(const std::string& start_recep);

}  // namespace evu::agent
