#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evu/agent/belief.hpp"
#include "evu/agent/strategy.hpp"
#include "evu/backend/backend.hpp"
#include "evu/minihouse/action.hpp"
#include "evu/minihouse/task.hpp"
#include "evu/minihouse/world.hpp"

namespace evu::agent {

/// One agent-environment exchange. `observation` is what the agent saw
/// this turn (the result of the previous action, or the initial
/// observation on turn 1); the strategy fields were generated after it.
struct TurnRecord {
    int turn = 0;
    minihouse::Observation observation;
    std::optional<std::string> estimate;
    std::optional<std::string> verification;
    std::optional<BeliefState> belief;
    std::optional<std::string> thought;
    std::vector<std::string> reflections;  // MultipleReflection only
    std::string action_text;               // verbatim Action field
    std::optional<minihouse::ActionCommand> action;
    bool valid = true;
    backend::Usage usage;
    double latency_ms = 0.0;

    bool operator==(const TurnRecord&) const = default;
};

/// One entry of the interaction history kept by history-based strategies.
struct HistoryItem {
    enum class Kind { Observation, Action, OracleState };
    Kind kind = Kind::Observation;
    std::string text;

    bool operator==(const HistoryItem&) const = default;
};

using History = std::vector<HistoryItem>;

/// Inputs for prompt rendering. History-based strategies require
/// `history`; EVU requires `prior_belief` plus `last_turn` (null on the
/// first turn) and the recent action list.
struct PromptContext {
    enum class Call { Main, Estimate, Verify, Update, Reflect };

    const History* history = nullptr;
    const BeliefState* prior_belief = nullptr;
    const TurnRecord* last_turn = nullptr;
    const minihouse::Observation* obs = nullptr;
    const std::vector<std::string>* action_history = nullptr;
    int turn = 1;
    Call call = Call::Main;
    const std::string* estimate = nullptr;        // Verify/Update calls
    const std::string* verification = nullptr;    // Update call
    const std::vector<std::string>* reflections = nullptr;  // Reflect calls
};

/// Number of recent actions shown in the EVU action-history slot.
inline constexpr int kActionHistoryWindow = 10;

/// Renders the strategy's prompt. Throws ContractError when an EVU prompt
/// is requested without a prior belief state.
backend::BackendRequest render_prompt(const Strategy& strategy, const minihouse::TaskSpec& task,
                                      const PromptContext& ctx);

/// Result of splitting a structured model output on its labeled lines.
struct ParsedOutput {
    bool ok = false;
    std::string error;
    /// Canonical label -> field body (multi-line bodies joined).
    std::map<std::string, std::string> fields;
    /// Raw Action field body, preserved verbatim even when parsing fails
    /// on other grounds.
    std::string action_text;
};

/// Splits on labeled lines (case-insensitive, surrounding whitespace
/// tolerated, multi-line bodies allowed). Fields required by the strategy
/// but absent produce a failure listing the missing labels; duplicate
/// labels are an ambiguity error.
ParsedOutput parse_structured_output(std::string_view text, const Strategy& strategy);

/// Per-episode agent: owns the history / belief / action list for one
/// episode and produces one TurnRecord per act() call. Strategy
/// configuration is immutable; all mutable state is confined here.
class EpisodeAgent {
public:
    EpisodeAgent(Strategy strategy, minihouse::TaskSpec task, std::string start_recep);

    /// Rebuilds an agent mid-episode from a history prefix (used by the
    /// belief-intervention experiment on history-based strategies).
    static EpisodeAgent resume(Strategy strategy, minihouse::TaskSpec task, History prefix,
                               int next_turn);

    /// Runs one turn: renders the prompt(s), queries the backend, parses
    /// the structured output, and updates internal state. Backend failures
    /// propagate; parse failures yield valid = false with the raw text
    /// preserved.
    TurnRecord act(backend::Backend& backend, const minihouse::Observation& obs);

    /// Appends an oracle state description to the interaction history
    /// (the belief-intervention hook). History-based strategies only.
    void inject_oracle_state(const std::string& text);

    const History& history() const { return history_; }
    const BeliefState& belief() const { return belief_; }
    const Strategy& strategy() const { return strategy_; }
    int turn() const { return turn_; }

private:
    Strategy strategy_;
    minihouse::TaskSpec task_;
    History history_;
    BeliefState belief_;
    std::optional<TurnRecord> last_turn_;
    std::vector<std::string> action_history_;
    int turn_ = 0;
};

}  // namespace evu::agent
