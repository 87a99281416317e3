#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace evu::backend {

enum class Role { System, User, Assistant };

std::string_view to_string(Role r);

struct Message {
    Role role = Role::User;
    std::string text;

    bool operator==(const Message&) const = default;
};

enum class Mode { Generate, ScoreCandidates };

struct BackendRequest {
    std::vector<Message> messages;
    Mode mode = Mode::Generate;
    /// Single-token answer strings for ScoreCandidates; ignored by Generate.
    std::vector<std::string> candidates;
    double temperature = 0.0;
    int max_new_tokens = 512;
};

struct Usage {
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;

    bool operator==(const Usage&) const = default;
};

struct BackendResponse {
    std::string text;
    /// Log-score of each candidate as the first generated token
    /// (ScoreCandidates mode only). Every requested candidate is present
    /// with a finite score.
    std::map<std::string, double> candidate_scores;
    Usage usage;
    double latency_ms = 0.0;
};

/// Uniform text-generation-and-scoring contract. Implementations are safe
/// for concurrent calls; each call is independent.
class Backend {
public:
    virtual ~Backend() = default;

    /// mode must be Generate and messages non-empty.
    virtual BackendResponse generate(const BackendRequest& req) = 0;

    /// mode must be ScoreCandidates and candidates non-empty.
    virtual BackendResponse score_candidates(const BackendRequest& req) = 0;
};

/// Whitespace-delimited word count, the scripted backend's token counter.
std::int64_t count_words(std::string_view text);

/// Sum of count_words over all message texts.
std::int64_t count_prompt_words(const BackendRequest& req);

}  // namespace evu::backend
