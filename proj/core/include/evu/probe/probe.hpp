#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evu/backend/backend.hpp"
#include "evu/minihouse/variable.hpp"

namespace evu::probe {

/// Yes-no probe question for an environment variable. Text comes from the
/// fixed per-kind template and is injective over the schema.
struct ProbeQuestion {
    minihouse::Variable variable;
    std::string text;
    std::vector<std::string> candidates{"yes", "no"};

    static ProbeQuestion for_variable(minihouse::Variable v);
};

enum class Stage {
    Current,
    Estimated,
    Subsequent,
    AfterEstimate,
    AfterVerify,
    AfterUpdate,
    PreDecision,
};

std::string_view to_string(Stage s);

/// One probe measurement: raw score s, question bias b, debiased belief
/// beta = s - b, ground truth y, and True Belief Value A = y * beta.
struct ProbeResult {
    Stage stage = Stage::Current;
    double s = 0.0;
    double b = 0.0;
    double beta = 0.0;
    int y = 0;  // +1 or -1
    double A = 0.0;
    std::uint64_t context_fingerprint = 0;
};

/// The bare system prompt under which probes are asked.
std::string_view probe_system_prompt();

/// s(h, q): yes-score minus no-score for the context followed by the
/// question.
double raw_belief(backend::Backend& backend, const std::string& context,
                  const ProbeQuestion& q);

/// b(q): raw_belief on the empty history (system prompt + question only).
double question_bias(backend::Backend& backend, const ProbeQuestion& q);

/// A = y * beta.
double true_belief_value(double beta, int y);

/// Full measurement for a context with ground truth y; bias may be
/// supplied when already measured for this question.
ProbeResult probe_context(backend::Backend& backend, const std::string& context,
                          const ProbeQuestion& q, int y, Stage stage);
ProbeResult probe_context_with_bias(backend::Backend& backend, const std::string& context,
                                    const ProbeQuestion& q, int y, Stage stage, double bias);

}  // namespace evu::probe
