#include "evu/agent/agent.hpp"

#include "evu/errors.hpp"

namespace evu::agent {

using backend::BackendRequest;
using backend::BackendResponse;

namespace {

constexpr std::string_view kFormatReminder =
    "Reminder: respond exactly in the required labeled format, one field per line.";

struct CallResult {
    BackendResponse response;
    ParsedOutput parsed;
};

// One generation with a single re-prompt on parse failure.
CallResult generate_parsed(backend::Backend& backend, const BackendRequest& req,
                           const Strategy& strategy, backend::Usage& usage, double& latency) {
    CallResult r;
    r.response = backend.generate(req);
    usage.input_tokens += r.response.usage.input_tokens;
    usage.output_tokens += r.response.usage.output_tokens;
    latency += r.response.latency_ms;
    r.parsed = parse_structured_output(r.response.text, strategy);
    if (r.parsed.ok) return r;

    BackendRequest retry = req;
    retry.messages.push_back({backend::Role::User, std::string(kFormatReminder)});
    BackendResponse second = backend.generate(retry);
    usage.input_tokens += second.usage.input_tokens;
    usage.output_tokens += second.usage.output_tokens;
    latency += second.latency_ms;
    ParsedOutput reparsed = parse_structured_output(second.text, strategy);
    if (reparsed.ok) {
        r.response = std::move(second);
        r.parsed = std::move(reparsed);
    }
    return r;
}

// Extracts a single labeled field; falls back to the raw text so a
// scripted or well-behaved backend never derails the turn.
std::string single_field(backend::Backend& backend, const BackendRequest& req,
                         const std::string& label, backend::Usage& usage, double& latency) {
    BackendResponse resp = backend.generate(req);
    usage.input_tokens += resp.usage.input_tokens;
    usage.output_tokens += resp.usage.output_tokens;
    latency += resp.latency_ms;
    Strategy any;  // label search only; required-set not used here
    ParsedOutput parsed = parse_structured_output(resp.text, any);
    if (auto it = parsed.fields.find(label); it != parsed.fields.end()) return it->second;
    return resp.text;
}

}  // namespace

EpisodeAgent::EpisodeAgent(Strategy strategy, minihouse::TaskSpec task, std::string start_recep)
    : strategy_(strategy), task_(std::move(task)) {
    belief_ = make_belief(render_initial_belief(start_recep), 0);
}

EpisodeAgent EpisodeAgent::resume(Strategy strategy, minihouse::TaskSpec task, History prefix,
                                  int next_turn) {
    if (strategy.kind == StrategyKind::EVU)
        throw ContractError("EpisodeAgent::resume supports history-based strategies only");
    EpisodeAgent agent(strategy, std::move(task), "");
    agent.history_ = std::move(prefix);
    agent.turn_ = next_turn - 1;
    return agent;
}

void EpisodeAgent::inject_oracle_state(const std::string& text) {
    history_.push_back({HistoryItem::Kind::OracleState, text});
}

TurnRecord EpisodeAgent::act(backend::Backend& backend, const minihouse::Observation& obs) {
    ++turn_;
    history_.push_back({HistoryItem::Kind::Observation, obs.text});

    TurnRecord rec;
    rec.turn = turn_;
    rec.observation = obs;

    PromptContext ctx;
    ctx.history = &history_;
    ctx.prior_belief = &belief_;
    ctx.last_turn = last_turn_ ? &*last_turn_ : nullptr;
    ctx.obs = &obs;
    ctx.action_history = &action_history_;
    ctx.turn = turn_;

    if (strategy_.kind == StrategyKind::EVU &&
        strategy_.evu_mode == EvuMode::ThreeCall) {
        // Conditioning chain: estimate, then verification given the
        // estimate, then belief/thought/action given both.
        ctx.call = PromptContext::Call::Estimate;
        std::string estimate = single_field(backend, render_prompt(strategy_, task_, ctx),
                                            "Estimate", rec.usage, rec.latency_ms);
        ctx.call = PromptContext::Call::Verify;
        ctx.estimate = &estimate;
        std::string verification = single_field(backend, render_prompt(strategy_, task_, ctx),
                                                "Verification", rec.usage, rec.latency_ms);
        ctx.call = PromptContext::Call::Update;
        ctx.verification = &verification;
        CallResult r = generate_parsed(backend, render_prompt(strategy_, task_, ctx), strategy_,
                                       rec.usage, rec.latency_ms);
        rec.estimate = estimate;
        rec.verification = verification;
        if (auto it = r.parsed.fields.find("Belief State"); it != r.parsed.fields.end())
            rec.belief = make_belief(it->second, turn_);
        if (auto it = r.parsed.fields.find("Thought"); it != r.parsed.fields.end())
            rec.thought = it->second;
        rec.action_text = r.parsed.action_text;
        rec.valid = r.parsed.ok;
    } else if (strategy_.kind == StrategyKind::MultipleReflection) {
        ctx.call = PromptContext::Call::Reflect;
        ctx.reflections = &rec.reflections;
        for (int i = 0; i < strategy_.reflection_rounds; ++i) {
            std::string reflection = single_field(backend, render_prompt(strategy_, task_, ctx),
                                                  "Reflection", rec.usage, rec.latency_ms);
            rec.reflections.push_back(std::move(reflection));
        }
        ctx.call = PromptContext::Call::Main;
        CallResult r = generate_parsed(backend, render_prompt(strategy_, task_, ctx), strategy_,
                                       rec.usage, rec.latency_ms);
        if (auto it = r.parsed.fields.find("Thought"); it != r.parsed.fields.end())
            rec.thought = it->second;
        rec.action_text = r.parsed.action_text;
        rec.valid = r.parsed.ok;
    } else {
        ctx.call = PromptContext::Call::Main;
        CallResult r = generate_parsed(backend, render_prompt(strategy_, task_, ctx), strategy_,
                                       rec.usage, rec.latency_ms);
        if (auto it = r.parsed.fields.find("Reason"); it != r.parsed.fields.end())
            rec.estimate = it->second;
        if (auto it = r.parsed.fields.find("Belief State"); it != r.parsed.fields.end())
            rec.belief = make_belief(it->second, turn_);
        if (auto it = r.parsed.fields.find("Belief"); it != r.parsed.fields.end())
            rec.belief = make_belief(it->second, turn_);
        if (auto it = r.parsed.fields.find("Thought"); it != r.parsed.fields.end())
            rec.thought = it->second;
        rec.action_text = r.parsed.action_text;
        rec.valid = r.parsed.ok;
    }

    rec.action = minihouse::parse_action(rec.action_text);
    rec.valid = rec.valid && rec.action.has_value();

    history_.push_back({HistoryItem::Kind::Action, rec.action_text});
    action_history_.push_back(rec.action_text);
    if (rec.belief) belief_ = *rec.belief;
    last_turn_ = rec;
    return rec;
}

}  // namespace evu::agent
