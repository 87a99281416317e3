#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "evu/backend/backend.hpp"
#include "evu/minihouse/action.hpp"
#include "evu/minihouse/task.hpp"
#include "evu/minihouse/variable.hpp"

namespace evu::backend {

enum class NeglectMode { Compliant, ForcedNeglect };

std::string_view to_string(NeglectMode m);
std::optional<NeglectMode> neglect_mode_from_string(std::string_view s);

struct ScriptedConfig {
    /// Turns of history the policy reads from a history-style prompt
    /// (the task goal and the initial observation are always visible).
    int context_window = 6;
    NeglectMode neglect_mode = NeglectMode::Compliant;
    /// Synthetic yes/no score magnitudes; unknown scores are the midpoint.
    double logit_hi = 2.0;
    double logit_lo = -2.0;
};

enum class Verdict { True, False, Unknown };

/// What the scripted policy "knows", rebuilt per call purely from the
/// visible portion of the prompt (never from hidden world access).
struct ScriptedKnowledge {
    std::vector<minihouse::Literal> goal;
    /// obj -> receptacle id or "hand"; absent means location unknown.
    std::map<std::string, std::string> object_location;
    /// obj -> receptacles believed not to hold it.
    std::map<std::string, std::set<std::string>> excluded;
    std::map<std::string, bool> recep_open;
    std::map<std::string, std::map<minihouse::Attr, bool>> attrs;
    std::optional<std::string> at;
    std::optional<bool> hand_empty;
    /// Receptacles whose contents have been seen (or that the belief
    /// records as already searched).
    std::set<std::string> searched;
    /// Receptacle names mentioned anywhere in the visible context.
    std::set<std::string> roster;
    std::optional<minihouse::ActionCommand> last_action;
    std::optional<std::string> last_observation_text;
    /// Receptacle of the most recent contents enumeration, if any.
    std::optional<std::string> last_enumerated_recep;

    Verdict verdict(const minihouse::Variable& v) const;
    std::optional<std::string> held_object() const;
};

/// Deterministic stand-in for a language-model policy. Parses the visible
/// prompt, rebuilds its knowledge, and either plans the next action with a
/// greedy goal-directed policy (Generate) or answers yes/no probes from a
/// fixed synthetic-logit table (ScoreCandidates).
///
/// In ForcedNeglect mode the policy never integrates sighting reports of
/// goal objects from observations (it still echoes the observation text in
/// reiteration fields), and it treats the receptacle targeted by the last
/// action as searched-and-empty for every unlocated goal object. Oracle
/// "Environment State" lines and belief-state lines bypass the filter.
class ScriptedBackend : public Backend {
public:
    explicit ScriptedBackend(ScriptedConfig cfg = {});

    BackendResponse generate(const BackendRequest& req) override;
    BackendResponse score_candidates(const BackendRequest& req) override;

    const ScriptedConfig& config() const { return cfg_; }

    /// Exposed for tests: the knowledge the policy would rebuild from a
    /// prompt. `prompt` is the concatenated message texts.
    ScriptedKnowledge knowledge_from_prompt(const std::string& prompt) const;

    /// Synthetic (yes, no) scores for a verdict under a config.
    static std::pair<double, double> scores_for(Verdict v, const ScriptedConfig& cfg);

private:
    ScriptedConfig cfg_;
};

}  // namespace evu::backend
