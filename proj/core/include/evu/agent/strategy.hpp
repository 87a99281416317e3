#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace evu::agent {

enum class StrategyKind {
    NoThinking,
    PlanAndAct,
    ReAct,
    NoneBI,
    DBI,
    OBI,
    ReflAct,
    VAGEN,
    EVU,
    MultipleReflection,
};

enum class EvuMode { SingleGeneration, ThreeCall };

/// Immutable per-agent strategy configuration.
struct Strategy {
    StrategyKind kind = StrategyKind::ReAct;
    EvuMode evu_mode = EvuMode::SingleGeneration;  // EVU only
    int reflection_rounds = 2;                     // MultipleReflection only

    bool operator==(const Strategy&) const = default;
};

std::string_view to_string(StrategyKind k);
std::optional<StrategyKind> strategy_kind_from_string(std::string_view s);
std::string_view to_string(EvuMode m);
std::optional<EvuMode> evu_mode_from_string(std::string_view s);

/// True for strategies that condition on the full interaction history
/// (everything except EVU, which carries a recursive belief state).
bool is_history_based(StrategyKind k);

/// True for strategies whose turns carry a belief field.
bool is_belief_bearing(StrategyKind k);

}  // namespace evu::agent
