#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "evu/minihouse/action.hpp"
#include "evu/minihouse/task.hpp"
#include "evu/minihouse/variable.hpp"

namespace evu::minihouse {

/// Location value meaning "in the agent's hand".
inline constexpr const char* kAgentHand = "hand";

struct ObjectState {
    std::string kind;      // "apple", "knife", "desklamp", ...
    std::string location;  // receptacle id or kAgentHand
    bool clean = false;
    bool hot = false;
    bool cold = false;
    bool toggled = false;

    bool operator==(const ObjectState&) const = default;
};

struct ReceptacleState {
    std::string kind;      // "countertop", "fridge", ...
    bool openable = false;
    bool open = true;      // surfaces are always open

    bool operator==(const ReceptacleState&) const = default;
};

/// The hidden POMDP state. Mutates only through Environment::step;
/// identical (seed, action sequence) pairs yield bit-identical states.
struct WorldState {
    std::map<std::string, ObjectState> objects;
    std::map<std::string, ReceptacleState> receptacles;
    std::string agent_at;
    std::uint64_t rng_seed = 0;
    int step_count = 0;

    bool operator==(const WorldState&) const = default;
};

struct Observation {
    std::string text;
    std::vector<Literal> revealed;  // machine-readable mirror of text
    bool valid = true;              // false iff text == "Nothing happened"

    bool operator==(const Observation&) const = default;
};

/// The exact invalid-action sentinel from the prompt templates.
inline constexpr const char* kNothingHappened = "Nothing happened";

// --- domain vocabulary (static kind knowledge, not hidden state) ---

bool is_openable_kind(std::string_view kind);
bool is_toggleable_kind(std::string_view kind);
/// "in" for containers, "on" for surfaces.
std::string_view preposition_for_kind(std::string_view recep_kind);
/// Receptacle kind that grants an attribute: sinkbasin/microwave/fridge.
std::string_view appliance_kind_for(Attr a);
/// "apple 1" -> "apple".
std::string kind_of_entity(std::string_view entity);
/// "an" before a vowel sound, else "a".
std::string_view article_for(std::string_view entity);

// --- oracle queries ---

/// Ground truth of a variable: +1 if it holds, -1 otherwise.
/// Throws SchemaError for unknown entities or variables outside the
/// probe schema (Holding/In/On/Open/Attribute).
int query_variable(const WorldState& state, const Variable& v);

/// Deterministic natural-language rendering of the ground-truth values
/// of the given variables (the oracle environment state description).
/// Accepts At in addition to the probe schema. Throws SchemaError
/// naming the variable when an entity is unknown.
std::string oracle_state_text(const WorldState& state, std::span<const Variable> variables);

/// True when every goal literal holds in the state.
bool goal_satisfied(const WorldState& state, const std::vector<Literal>& goal);

// --- the environment ---

struct StepResult {
    Observation obs;
    int reward = 0;
    bool done = false;
};

struct ResetOptions {
    std::uint64_t seed = 0;
    TaskFamily family = TaskFamily::PickPlace;
    Difficulty difficulty = Difficulty::Easy;
    int horizon = 40;
};

class Environment {
public:
    Environment(WorldState state, TaskSpec task, int horizon);

    /// Applies an action. Valid actions mutate the state per household
    /// semantics; invalid ones leave it unchanged and return the
    /// "Nothing happened" observation. Throws ContractError when called
    /// on a terminal environment.
    StepResult step(const ActionCommand& action);

    const WorldState& state() const { return state_; }
    const TaskSpec& task() const { return task_; }
    const Observation& initial_observation() const { return initial_obs_; }
    int horizon() const { return horizon_; }
    bool done() const { return done_; }

private:
    friend Environment reset(const ResetOptions&);

    WorldState state_;
    TaskSpec task_;
    Observation initial_obs_;
    int horizon_ = 40;
    bool done_ = false;
};

/// Generates a solvable episode for (seed, family, difficulty). The
/// initial observation describes the receptacle roster and the contents
/// of every visible (open or surface) receptacle. Throws ConfigError
/// for an unusable horizon and GenerationError (naming the seed) when
/// no layout lands in the difficulty bin within bounded retries.
Environment reset(const ResetOptions& opts);

/// Rebuilds the initial observation text for a world (pure function).
Observation render_initial_observation(const WorldState& state);

}  // namespace evu::minihouse
