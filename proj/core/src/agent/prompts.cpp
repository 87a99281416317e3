#include <algorithm>

#include "evu/agent/agent.hpp"
#include "evu/errors.hpp"

namespace evu::agent {

using backend::BackendRequest;
using backend::Message;
using backend::Role;

namespace {

constexpr std::string_view kIntro =
    "Interact with a household to solve a task. Imagine you are an intelligent agent in a "
    "household environment and your target is to perform actions to complete the task goal.";

constexpr std::string_view kFeedback =
    "After your each turn, the environment will give you immediate feedback based on which "
    "you plan your next few steps. If the environment output \"Nothing happened\", that "
    "means the previous action is invalid and you should try more options.";

constexpr std::string_view kBeliefGuidance =
    "State where the agent is, what it is holding, and the known status of goal-related "
    "objects. Do NOT list irrelevant objects.";

std::string actions_section() {
    return "The available actions are:\n" + std::string(minihouse::action_grammar_text());
}

std::string format_section(std::string_view block) {
    return "Your response should use the following format:\n\n" + std::string(block);
}

std::string goal_line(const minihouse::TaskSpec& task) {
    return "Your task is to complete the task goal: " + task.instruction;
}

std::string render_history(const History& history) {
    std::string out;
    for (const HistoryItem& item : history) {
        if (!out.empty()) out += "\n";
        switch (item.kind) {
            case HistoryItem::Kind::Observation: out += "Observation: " + item.text; break;
            case HistoryItem::Kind::Action: out += "Action: " + item.text; break;
            case HistoryItem::Kind::OracleState: out += "Environment State: " + item.text; break;
        }
    }
    return out;
}

std::string action_history_slot(const std::vector<std::string>* actions) {
    if (!actions || actions->empty()) return "(none)";
    size_t start = actions->size() > static_cast<size_t>(kActionHistoryWindow)
                       ? actions->size() - kActionHistoryWindow
                       : 0;
    std::string out;
    for (size_t i = start; i < actions->size(); ++i) {
        if (!out.empty()) out += ", ";
        out += (*actions)[i];
    }
    return out;
}

std::string last_turn_block(const PromptContext& ctx) {
    if (!ctx.obs) throw ContractError("render_prompt: EVU prompt requires the current observation");
    std::string out = "Last Turn's Information:";
    if (ctx.last_turn) {
        const TurnRecord& lt = *ctx.last_turn;
        std::string reason;
        if (lt.estimate) reason = *lt.estimate;
        if (lt.verification) reason += (reason.empty() ? "" : " ") + *lt.verification;
        if (!reason.empty()) out += "\nReason: " + reason;
        out += "\nBelief State: " + (ctx.prior_belief ? ctx.prior_belief->text : "");
        if (lt.thought) out += "\nThought: " + *lt.thought;
        out += "\nAction: " + lt.action_text;
    } else {
        out += "\nBelief State: " + (ctx.prior_belief ? ctx.prior_belief->text : "");
    }
    out += "\nObservation: " + ctx.obs->text;
    return out;
}

BackendRequest make_request(std::string system_text, std::string user_text) {
    BackendRequest req;
    req.mode = backend::Mode::Generate;
    req.temperature = 0.0;
    req.messages.push_back({Role::System, std::move(system_text)});
    req.messages.push_back({Role::User, std::move(user_text)});
    return req;
}

BackendRequest render_evu_single(const minihouse::TaskSpec& task, const PromptContext& ctx) {
    std::string system = std::string(kIntro) +
        "\n\nAt each step, you will be given task goal, action history and the last turn's "
        "information (Reason, Belief State, Thought, and Action).\n\n"
        "You need to process the information in a specific order:\n"
        "1. Reason: Analyze the last action and the observation in one or two concise "
        "sentences. What did you expect to see? What did you actually see? Does this confirm "
        "or contradict your previous belief?\n"
        "2. Belief State: " + std::string(kBeliefGuidance) + "\n"
        "3. Thought: Plan your future actions based on the updated belief.\n"
        "4. Action: Output your next action.\n\n" +
        actions_section() + "\n\n" + std::string(kFeedback) + "\n\n" +
        format_section(
            "Reason: <Analyze expectation vs. actual observation to update your understanding>\n"
            "Belief State: <your belief state>\n"
            "Thought: <your thoughts>\n"
            "Action: <your next action>");

    std::string user = goal_line(task) +
        "\n\nBelow is the action history and the last turn's information:\n\n"
        "Action History: " + action_history_slot(ctx.action_history) + "\n\n" +
        last_turn_block(ctx);
    return make_request(std::move(system), std::move(user));
}

BackendRequest render_evu_estimate(const minihouse::TaskSpec& task, const PromptContext& ctx) {
    std::string system = std::string(kIntro) +
        "\n\nYou maintain an explicit belief state of the environment. Before processing the "
        "actual new observation, predict the immediate consequence of your previous "
        "action.\n\n" +
        format_section("Estimate: <what you expect to observe>");
    std::string user = goal_line(task) +
        "\n\nAction History: " + action_history_slot(ctx.action_history) +
        "\n\nBelief State: " + (ctx.prior_belief ? ctx.prior_belief->text : "") +
        "\nAction: " + (ctx.last_turn ? ctx.last_turn->action_text : "(none)");
    return make_request(std::move(system), std::move(user));
}

BackendRequest render_evu_verify(const minihouse::TaskSpec& task, const PromptContext& ctx) {
    if (!ctx.estimate) throw ContractError("render_prompt: verify call requires the estimate");
    if (!ctx.obs) throw ContractError("render_prompt: verify call requires the observation");
    std::string system = std::string(kIntro) +
        "\n\nCompare your expectation against the actual observation. State explicitly "
        "whether the observation confirms or contradicts the expectation.\n\n" +
        format_section("Verification: <your comparison of expectation and observation>");
    std::string user = goal_line(task) +
        "\n\nAction History: " + action_history_slot(ctx.action_history) +
        "\n\nBelief State: " + (ctx.prior_belief ? ctx.prior_belief->text : "") +
        "\nAction: " + (ctx.last_turn ? ctx.last_turn->action_text : "(none)") +
        "\nObservation: " + ctx.obs->text +
        "\nEstimate: " + *ctx.estimate;
    return make_request(std::move(system), std::move(user));
}

BackendRequest render_evu_update(const minihouse::TaskSpec& task, const PromptContext& ctx) {
    if (!ctx.estimate || !ctx.verification)
        throw ContractError("render_prompt: update call requires estimate and verification");
    if (!ctx.obs) throw ContractError("render_prompt: update call requires the observation");
    std::string system = std::string(kIntro) +
        "\n\nUpdate your belief state based on the verification evidence, then plan and act. "
        "Belief State: " + std::string(kBeliefGuidance) + "\n\n" +
        actions_section() + "\n\n" + std::string(kFeedback) + "\n\n" +
        format_section(
            "Belief State: <your belief state>\n"
            "Thought: <your thoughts>\n"
            "Action: <your next action>");
    std::string user = goal_line(task) +
        "\n\nAction History: " + action_history_slot(ctx.action_history) +
        "\n\nBelief State: " + (ctx.prior_belief ? ctx.prior_belief->text : "") +
        "\nAction: " + (ctx.last_turn ? ctx.last_turn->action_text : "(none)") +
        "\nObservation: " + ctx.obs->text +
        "\nEstimate: " + *ctx.estimate +
        "\nVerification: " + *ctx.verification;
    return make_request(std::move(system), std::move(user));
}

struct HistoryStyle {
    std::string instructions;
    std::string format_block;
};

HistoryStyle history_style(const Strategy& strategy, int turn) {
    switch (strategy.kind) {
        case StrategyKind::NoThinking:
            return {"At each step, output your next action directly, without any reasoning.",
                    "Action: <your next action>"};
        case StrategyKind::PlanAndAct:
            if (turn == 1)
                return {"At the first step, think through a plan for the whole task; in all "
                        "subsequent steps, output actions directly without further thoughts.",
                        "Thought: <your plan for the task>\nAction: <your next action>"};
            return {"At the first step, think through a plan for the whole task; in all "
                    "subsequent steps, output actions directly without further thoughts.",
                    "Action: <your next action>"};
        case StrategyKind::ReAct:
            return {"At each step, first reason about the next action based on the "
                    "interaction history, then output the action.",
                    "Thought: <your thoughts>\nAction: <your next action>"};
        case StrategyKind::NoneBI:
            return {"At each step, proceed directly from the interaction history to your "
                    "thought and action.",
                    "Thought: <your thoughts>\nAction: <your next action>"};
        case StrategyKind::DBI:
            return {"At each step, before deciding, first state your current belief about "
                    "the environment state relevant to the goal, then think and act.",
                    "Belief: <your current belief about the environment>\n"
                    "Thought: <your thoughts>\nAction: <your next action>"};
        case StrategyKind::OBI:
            return {"At each step, before deciding, first reiterate the most recent "
                    "observation explicitly, then summarize the state you believe you are "
                    "in, then think and act.",
                    "Belief: <reiterate the observation, then your inferred state>\n"
                    "Thought: <your thoughts>\nAction: <your next action>"};
        case StrategyKind::ReflAct:
            return {"At each step, before deciding, reflect on your progress relative to "
                    "the goal: what has been accomplished and what remains to be done.",
                    "Belief: <your reflection on progress relative to the goal>\n"
                    "Thought: <your thoughts>\nAction: <your next action>"};
        case StrategyKind::VAGEN:
            return {"At each step, before deciding, state the current state, propose a "
                    "hypothetical action, and predict the environmental state that would "
                    "follow it.",
                    "Belief: <current state, hypothetical action, predicted future state>\n"
                    "Thought: <your thoughts>\nAction: <your next action>"};
        case StrategyKind::MultipleReflection:
            return {"You have reflected on your reasoning. Now decide on the next action.",
                    "Thought: <your thoughts>\nAction: <your next action>"};
        default:
            throw ContractError("history_style called for a non-history strategy");
    }
}

BackendRequest render_history_prompt(const Strategy& strategy, const minihouse::TaskSpec& task,
                                     const PromptContext& ctx) {
    if (!ctx.history) throw ContractError("render_prompt: history-based strategy needs history");
    HistoryStyle style = history_style(strategy, ctx.turn);
    std::string system = std::string(kIntro) + "\n\n" + style.instructions + "\n\n" +
                         actions_section() + "\n\n" + std::string(kFeedback) + "\n\n" +
                         format_section(style.format_block);
    std::string user = goal_line(task) + "\n\nBelow is the interaction history:\n\n" +
                       render_history(*ctx.history);
    if (ctx.reflections) {
        for (const std::string& r : *ctx.reflections) user += "\nReflection: " + r;
    }
    return make_request(std::move(system), std::move(user));
}

BackendRequest render_reflection_prompt(const Strategy& strategy, const minihouse::TaskSpec& task,
                                        const PromptContext& ctx) {
    if (!ctx.history) throw ContractError("render_prompt: reflection call needs history");
    std::string system = std::string(kIntro) +
        "\n\nBefore deciding on an action, reflect on possible mistakes in your reasoning so "
        "far. You will reflect " + std::to_string(strategy.reflection_rounds) +
        " times before acting.\n\n" +
        format_section("Reflection: <your reflection on possible mistakes>");
    std::string user = goal_line(task) + "\n\nBelow is the interaction history:\n\n" +
                       render_history(*ctx.history);
    if (ctx.reflections) {
        for (const std::string& r : *ctx.reflections) user += "\nReflection: " + r;
    }
    return make_request(std::move(system), std::move(user));
}

}  // namespace

BackendRequest render_prompt(const Strategy& strategy, const minihouse::TaskSpec& task,
                             const PromptContext& ctx) {
    if (strategy.kind == StrategyKind::EVU) {
        if (!ctx.prior_belief)
            throw ContractError("render_prompt: EVU prompt requested without a prior belief");
        switch (ctx.call) {
            case PromptContext::Call::Main: return render_evu_single(task, ctx);
            case PromptContext::Call::Estimate: return render_evu_estimate(task, ctx);
            case PromptContext::Call::Verify: return render_evu_verify(task, ctx);
            case PromptContext::Call::Update: return render_evu_update(task, ctx);
            case PromptContext::Call::Reflect:
                throw ContractError("render_prompt: EVU has no reflection call");
        }
    }
    if (ctx.call == PromptContext::Call::Reflect)
        return render_reflection_prompt(strategy, task, ctx);
    return render_history_prompt(strategy, task, ctx);
}

std::string_view to_string(StrategyKind k) {
    switch (k) {
        case StrategyKind::NoThinking: return "no_thinking";
        case StrategyKind::PlanAndAct: return "plan_and_act";
        case StrategyKind::ReAct: return "react";
        case StrategyKind::NoneBI: return "none_bi";
        case StrategyKind::DBI: return "dbi";
        case StrategyKind::OBI: return "obi";
        case StrategyKind::ReflAct: return "reflact";
        case StrategyKind::VAGEN: return "vagen";
        case StrategyKind::EVU: return "evu";
        case StrategyKind::MultipleReflection: return "multiple_reflection";
    }
    return "?";
}

std::optional<StrategyKind> strategy_kind_from_string(std::string_view s) {
    for (StrategyKind k : {StrategyKind::NoThinking, StrategyKind::PlanAndAct, StrategyKind::ReAct,
                           StrategyKind::NoneBI, StrategyKind::DBI, StrategyKind::OBI,
                           StrategyKind::ReflAct, StrategyKind::VAGEN, StrategyKind::EVU,
                           StrategyKind::MultipleReflection}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

std::string_view to_string(EvuMode m) {
    return m == EvuMode::SingleGeneration ? "single_generation" : "three_call";
}

std::optional<EvuMode> evu_mode_from_string(std::string_view s) {
    if (s == "single_generation") return EvuMode::SingleGeneration;
    if (s == "three_call") return EvuMode::ThreeCall;
    return std::nullopt;
}

bool is_history_based(StrategyKind k) { return k != StrategyKind::EVU; }

bool is_belief_bearing(StrategyKind k) {
    switch (k) {
        case StrategyKind::EVU:
        case StrategyKind::DBI:
        case StrategyKind::OBI:
        case StrategyKind::ReflAct:
        case StrategyKind::VAGEN:
            return true;
        default:
            return false;
    }
}

}  // namespace evu::agent
