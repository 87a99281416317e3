#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evu/agent/agent.hpp"
#include "evu/minihouse/task.hpp"
#include "evu/minihouse/world.hpp"

namespace evu::harness {

enum class TerminatedBy { Goal, Horizon, Error };

std::string_view to_string(TerminatedBy t);
std::optional<TerminatedBy> terminated_by_from_string(std::string_view s);

/// One complete episode. turns[i].observation is what the agent saw on
/// turn i+1; final_observation is the feedback produced by the last
/// action (it has no agent turn after it).
struct Trajectory {
    minihouse::TaskSpec task;
    std::uint64_t seed = 0;
    agent::Strategy strategy;
    int horizon = 40;
    std::vector<agent::TurnRecord> turns;
    minihouse::Observation final_observation;
    int reward = 0;
    TerminatedBy terminated_by = TerminatedBy::Horizon;
    std::string backend_label;

    bool operator==(const Trajectory&) const = default;

    std::int64_t total_input_tokens() const;
    std::int64_t total_output_tokens() const;
    double total_latency_ms() const;
};

/// Line-delimited persistence: a schema-versioned header record, one
/// record per turn, and a trailer with the final observation. Byte-exact
/// for identical trajectories.
std::string trajectory_to_jsonl(const Trajectory& traj);
Trajectory trajectory_from_jsonl(const std::string& text);

void save_trajectory(const Trajectory& traj, const std::string& path);
Trajectory load_trajectory(const std::string& path);

/// Replays the episode's world: reconstructs the environment from
/// (seed, family, difficulty, horizon) and applies the first
/// `through_turn` recorded actions. through_turn = 0 gives the initial
/// state. Throws ContractError when the trajectory cannot be replayed.
minihouse::WorldState replay_world_state(const Trajectory& traj, int through_turn);

}  // namespace evu::harness
