#pragma once

#include <string>

#include "evu/backend/backend.hpp"

namespace evu::backend {

/// Connection settings for a chat-completion-style service. The bearer
/// token is read from the environment variable named by auth_env_var at
/// call time; an empty or unset variable sends no Authorization header.
struct RemoteConfig {
    std::string base_url = "http://localhost:8000";
    std::string chat_path = "/v1/chat/completions";
    /// Text-completions endpoint used for per-candidate echo scoring when
    /// the chat endpoint returns no token log-probabilities.
    std::string completions_path = "/v1/completions";
    std::string model = "default";
    std::string auth_env_var = "EVU_API_KEY";
    int max_retries = 3;
    int backoff_initial_ms = 500;
    int top_logprobs = 20;
    int timeout_sec = 120;
};

class RemoteBackend : public Backend {
public:
    explicit RemoteBackend(RemoteConfig cfg);

    BackendResponse generate(const BackendRequest& req) override;

    /// Reads per-candidate first-token log-probabilities. Primary path:
    /// top_logprobs from the chat endpoint. When a candidate is absent
    /// from the returned distribution, falls back to one scored (echoed)
    /// continuation per candidate on the completions endpoint. Throws
    /// CapabilityError when the service exposes no token scores and
    /// TokenizationError when a candidate spans more than one token.
    BackendResponse score_candidates(const BackendRequest& req) override;

    const RemoteConfig& config() const { return cfg_; }

private:
    std::string post_with_retry(const std::string& path, const std::string& payload);

    RemoteConfig cfg_;
};

}  // namespace evu::backend
