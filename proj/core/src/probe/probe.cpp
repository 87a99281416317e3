#include "evu/probe/probe.hpp"

#include <functional>

#include "evu/errors.hpp"

namespace evu::probe {

using backend::BackendRequest;
using backend::Message;
using backend::Mode;
using backend::Role;

ProbeQuestion ProbeQuestion::for_variable(minihouse::Variable v) {
    ProbeQuestion q;
    q.text = minihouse::question_for_variable(v);
    q.variable = std::move(v);
    return q;
}

std::string_view to_string(Stage s) {
    switch (s) {
        case Stage::Current: return "current";
        case Stage::Estimated: return "estimated";
        case Stage::Subsequent: return "subsequent";
        case Stage::AfterEstimate: return "after_estimate";
        case Stage::AfterVerify: return "after_verify";
        case Stage::AfterUpdate: return "after_update";
        case Stage::PreDecision: return "pre_decision";
    }
    return "?";
}

std::string_view probe_system_prompt() {
    return "You are an agent in a household environment. Answer the question with \"yes\" or "
           "\"no\".";
}

namespace {

double score_difference(backend::Backend& backend, const std::string* context,
                        const ProbeQuestion& q) {
    BackendRequest req;
    req.mode = Mode::ScoreCandidates;
    req.candidates = q.candidates;
    req.temperature = 0.0;
    req.messages.push_back({Role::System, std::string(probe_system_prompt())});
    if (context && !context->empty()) req.messages.push_back({Role::User, *context});
    req.messages.push_back({Role::User, q.text});

    backend::BackendResponse resp = backend.score_candidates(req);
    auto yes = resp.candidate_scores.find("yes");
    auto no = resp.candidate_scores.find("no");
    if (yes == resp.candidate_scores.end() || no == resp.candidate_scores.end())
        throw ContractError("probe: backend response is missing a yes/no candidate score");
    return yes->second - no->second;
}

}  // namespace

double raw_belief(backend::Backend& backend, const std::string& context, const ProbeQuestion& q) {
    return score_difference(backend, &context, q);
}

double question_bias(backend::Backend& backend, const ProbeQuestion& q) {
    return score_difference(backend, nullptr, q);
}

double true_belief_value(double beta, int y) { return static_cast<double>(y) * beta; }

ProbeResult probe_context_with_bias(backend::Backend& backend, const std::string& context,
                                    const ProbeQuestion& q, int y, Stage stage, double bias) {
    ProbeResult r;
    r.stage = stage;
    r.s = raw_belief(backend, context, q);
    r.b = bias;
    r.beta = r.s - r.b;
    r.y = y;
    r.A = true_belief_value(r.beta, y);
    r.context_fingerprint = std::hash<std::string>{}(context);
    return r;
}

ProbeResult probe_context(backend::Backend& backend, const std::string& context,
                          const ProbeQuestion& q, int y, Stage stage) {
    return probe_context_with_bias(backend, context, q, y, stage, question_bias(backend, q));
}

}  // namespace evu::probe
