#include "evu/backend/remote.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "evu/errors.hpp"

namespace evu::backend {

namespace {

using nlohmann::json;

json messages_to_json(const std::vector<Message>& messages) {
    json out = json::array();
    for (const Message& m : messages)
        out.push_back({{"role", std::string(to_string(m.role))}, {"content", m.text}});
    return out;
}

std::string concat_text(const std::vector<Message>& messages) {
    std::string out;
    for (const Message& m : messages) {
        if (!out.empty()) out += "\n";
        out += m.text;
    }
    return out;
}

Usage usage_from_json(const json& j, const BackendRequest& req, const std::string& text) {
    Usage u;
    if (j.contains("usage") && j["usage"].is_object()) {
        u.input_tokens = j["usage"].value("prompt_tokens", 0);
        u.output_tokens = j["usage"].value("completion_tokens", 0);
    }
    if (u.input_tokens <= 0) u.input_tokens = count_prompt_words(req);
    if (u.output_tokens <= 0) u.output_tokens = count_words(text);
    return u;
}

}  // namespace

RemoteBackend::RemoteBackend(RemoteConfig cfg) : cfg_(std::move(cfg)) {}

std::string RemoteBackend::post_with_retry(const std::string& path, const std::string& payload) {
    httplib::Client client(cfg_.base_url);
    client.set_connection_timeout(cfg_.timeout_sec);
    client.set_read_timeout(cfg_.timeout_sec);

    httplib::Headers headers;
    if (const char* token = std::getenv(cfg_.auth_env_var.c_str()); token && *token)
        headers.emplace("Authorization", std::string("Bearer ") + token);

    std::string attempt_log;
    int backoff_ms = cfg_.backoff_initial_ms;
    for (int attempt = 1; attempt <= cfg_.max_retries; ++attempt) {
        auto res = client.Post(path, headers, payload, "application/json");
        if (res && res->status >= 200 && res->status < 300) return res->body;

        attempt_log += "attempt " + std::to_string(attempt) + ": ";
        if (!res) {
            attempt_log += "transport error (" + httplib::to_string(res.error()) + ")";
        } else {
            attempt_log += "HTTP " + std::to_string(res->status);
            // 4xx responses are not retryable; the request itself is bad.
            if (res->status < 500)
                throw BackendError("remote backend: " + attempt_log + " for " + cfg_.base_url +
                                   path + ": " + res->body);
        }
        attempt_log += "; ";
        if (attempt < cfg_.max_retries) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms *= 2;
        }
    }
    throw BackendError("remote backend: all retries failed for " + cfg_.base_url + path + ": " +
                       attempt_log);
}

BackendResponse RemoteBackend::generate(const BackendRequest& req) {
    if (req.mode != Mode::Generate)
        throw ContractError("generate called with a non-Generate request");
    if (req.messages.empty()) throw ContractError("generate called with no messages");

    json payload = {{"model", cfg_.model},
                    {"messages", messages_to_json(req.messages)},
                    {"temperature", req.temperature},
                    {"max_tokens", req.max_new_tokens}};

    auto start = std::chrono::steady_clock::now();
    std::string body = post_with_retry(cfg_.chat_path, payload.dump());
    auto elapsed = std::chrono::steady_clock::now() - start;

    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || j["choices"].empty())
        throw BackendError("remote backend: malformed chat response: " + body.substr(0, 200));

    BackendResponse resp;
    const json& choice = j["choices"][0];
    if (choice.contains("message") && choice["message"].contains("content") &&
        choice["message"]["content"].is_string())
        resp.text = choice["message"]["content"].get<std::string>();
    resp.usage = usage_from_json(j, req, resp.text);
    resp.latency_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(elapsed).count();
    return resp;
}

BackendResponse RemoteBackend::score_candidates(const BackendRequest& req) {
    if (req.mode != Mode::ScoreCandidates)
        throw ContractError("score_candidates called with a non-ScoreCandidates request");
    if (req.candidates.empty())
        throw ContractError("score_candidates called with an empty candidate list");
    if (req.messages.empty()) throw ContractError("score_candidates called with no messages");

    json payload = {{"model", cfg_.model},
                    {"messages", messages_to_json(req.messages)},
                    {"temperature", req.temperature},
                    {"max_tokens", 1},
                    {"logprobs", true},
                    {"top_logprobs", cfg_.top_logprobs}};

    auto start = std::chrono::steady_clock::now();
    std::string body = post_with_retry(cfg_.chat_path, payload.dump());

    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || j["choices"].empty())
        throw BackendError("remote backend: malformed scoring response: " + body.substr(0, 200));

    BackendResponse resp;

    // Primary path: the first generated token's top_logprobs distribution.
    std::map<std::string, double> table;
    const json& choice = j["choices"][0];
    if (choice.contains("logprobs") && choice["logprobs"].is_object()) {
        const json& lp = choice["logprobs"];
        if (lp.contains("content") && lp["content"].is_array() && !lp["content"].empty()) {
            for (const json& tok : lp["content"][0].value("top_logprobs", json::array())) {
                if (tok.contains("token") && tok.contains("logprob"))
                    table[tok["token"].get<std::string>()] = tok["logprob"].get<double>();
            }
        }
    }

    auto lookup = [&](const std::string& candidate) -> std::optional<double> {
        for (const std::string& form : {candidate, " " + candidate}) {
            if (auto it = table.find(form); it != table.end()) return it->second;
        }
        return std::nullopt;
    };

    std::vector<std::string> missing;
    for (const std::string& c : req.candidates) {
        if (auto score = lookup(c))
            resp.candidate_scores[c] = *score;
        else
            missing.push_back(c);
    }

    // Fallback: one scored (echoed) continuation per missing candidate on
    // the completions endpoint.
    if (!missing.empty()) {
        if (table.empty() && cfg_.completions_path.empty())
            throw CapabilityError(
                "remote backend: service exposes no token scores; use the scripted backend");
        std::string prompt = concat_text(req.messages);
        for (const std::string& c : missing) {
            json cpayload = {{"model", cfg_.model},
                             {"prompt", prompt + " " + c},
                             {"max_tokens", 0},
                             {"echo", true},
                             {"logprobs", 1}};
            std::string cbody;
            try {
                cbody = post_with_retry(cfg_.completions_path, cpayload.dump());
            } catch (const BackendError&) {
                throw CapabilityError(
                    "remote backend: service exposes no token scores for candidate \"" + c +
                    "\"; use the scripted backend");
            }
            json cj = json::parse(cbody, nullptr, false);
            if (cj.is_discarded() || !cj.contains("choices") || cj["choices"].empty() ||
                !cj["choices"][0].contains("logprobs"))
                throw CapabilityError(
                    "remote backend: completions endpoint returned no logprobs; use the "
                    "scripted backend");
            const json& lp = cj["choices"][0]["logprobs"];
            const json& offsets = lp.value("text_offset", json::array());
            const json& probs = lp.value("token_logprobs", json::array());
            int boundary = static_cast<int>(prompt.size());
            std::vector<double> candidate_tokens;
            for (size_t i = 0; i < offsets.size() && i < probs.size(); ++i) {
                if (offsets[i].get<int>() >= boundary && !probs[i].is_null())
                    candidate_tokens.push_back(probs[i].get<double>());
            }
            if (candidate_tokens.empty())
                throw CapabilityError(
                    "remote backend: completions endpoint returned no scored continuation; "
                    "use the scripted backend");
            if (candidate_tokens.size() > 1)
                throw TokenizationError("candidate is not a single token: \"" + c + "\"");
            resp.candidate_scores[c] = candidate_tokens.front();
        }
    }

    auto elapsed = std::chrono::steady_clock::now() - start;
    resp.usage = usage_from_json(j, req, "");
    resp.latency_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(elapsed).count();
    return resp;
}

}  // namespace evu::backend
