#pragma once

#include "laudit/gateway.hpp"

#include <chrono>
#include <string>

namespace laudit::gateway {

struct HttpSettings {
    std::string base_url;  ///< e.g. "https://api.example.com" (an optional path prefix is kept)
    std::string model;
    std::string api_key_env;  ///< environment variable holding the bearer token
    int attempts = 3;
    std::chrono::milliseconds initial_backoff{1000};
    std::chrono::seconds timeout{60};
    int logprobs = 5;  ///< top alternatives requested per position
};

/// OpenAI-compatible /v1/completions client used as the target model.
///
/// Scoring sends prefix+text with echo=true and keeps the tokens whose text
/// offset falls inside `text`. The first token of a prompt carries no
/// logprob, so the first token of `text` is always dropped; this keeps the
/// conditional and unconditional token lists aligned for ReCaLL.
class HttpTargetBackend final : public Backend {
public:
    explicit HttpTargetBackend(HttpSettings settings);

    std::vector<TokenScore> score_tokens(std::string_view text, const std::optional<std::string>& prefix,
                                         int top_k) const override;
    Continuation generate(std::string_view prefix, int max_tokens) const override;

private:
    HttpSettings settings_;
};

/// OpenAI-compatible /v1/chat/completions client used as the auxiliary model.
class HttpAuxiliaryBackend final : public Backend {
public:
    explicit HttpAuxiliaryBackend(HttpSettings settings);

    std::string rewrite(std::string_view prompt, std::string_view text) const override;
    std::string instruct(std::string_view instruction, std::span<const std::string> materials) const override;

private:
    std::string chat(const std::string& content) const;
    HttpSettings settings_;
};

/// POSTs `body` to base_url + path with retries and exponential backoff.
/// Non-2xx or connection failure after the last attempt raises TransportError.
nlohmann::json post_json(const HttpSettings& settings, const std::string& path, const nlohmann::json& body);

ModelHandle make_http_target(HttpSettings settings);
ModelHandle make_http_auxiliary(HttpSettings settings);

}  // namespace laudit::gateway
