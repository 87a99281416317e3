#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evu/minihouse/action.hpp"
#include "evu/minihouse/variable.hpp"

namespace evu::minihouse {

enum class TaskFamily {
    PickPlace,
    PickCleanPlace,
    PickHeatPlace,
    PickCoolPlace,
    PickTwo,
    LookInLight,
};

enum class Difficulty { Easy, Medium, Hard, VeryHard };

std::string_view to_string(TaskFamily f);
std::string_view to_string(Difficulty d);
std::optional<TaskFamily> task_family_from_string(std::string_view s);
std::optional<Difficulty> difficulty_from_string(std::string_view s);

/// Difficulty bins over the subgoal count: 0-4 Easy, 5-8 Medium,
/// 9-12 Hard, 13+ VeryHard.
Difficulty difficulty_for_subgoals(int subgoal_count);

/// Inclusive subgoal-count range of a difficulty bin.
std::pair<int, int> subgoal_range(Difficulty d);

struct TaskSpec {
    std::string instruction;
    std::vector<Literal> goal;  // conjunction; every literal has truth = true
    int subgoal_count = 0;
    Difficulty difficulty = Difficulty::Easy;
    TaskFamily family = TaskFamily::PickPlace;
    /// The generator's solution plan; subgoal_count is its length.
    std::vector<ActionCommand> reference_plan;

    bool operator==(const TaskSpec&) const = default;
};

/// Canonical instruction grammar. Instructions are a conjunction of goal
/// phrases joined by " and ":
///   put the {obj} in|on the {recep}      -> In/On(obj, recep)
///   make the {obj} clean|hot|cold        -> Attribute(obj, ...)
///   turn on the {obj}                    -> Attribute(obj, toggled)
///   pick up the {obj}                    -> Holding(obj)
std::string render_instruction(const std::vector<Literal>& goal);

/// Parses an instruction back into goal literals, in phrase order.
/// Returns an empty vector if any phrase is unrecognized.
std::vector<Literal> parse_instruction(std::string_view instruction);

/// Derives an independent per-episode seed from a base seed and an index
/// (splitmix64 mixing). Parallel episode order never changes results.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace evu::minihouse
