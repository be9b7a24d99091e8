#include "laudit/http_backend.hpp"

#include "laudit/errors.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace laudit::gateway {

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path_prefix;
};

Endpoint split_url(const std::string& url) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) throw ValidationError("base_url must include a scheme: " + url);
    const auto slash = url.find('/', scheme + 3);
    Endpoint e;
    e.origin = url.substr(0, slash);
    if (slash != std::string::npos) e.path_prefix = url.substr(slash);
    while (!e.path_prefix.empty() && e.path_prefix.back() == '/') e.path_prefix.pop_back();
    return e;
}

std::string api_key(const HttpSettings& s) {
    if (s.api_key_env.empty()) return {};
    const char* v = std::getenv(s.api_key_env.c_str());
    return v ? std::string(v) : std::string();
}

}  // namespace

nlohmann::json post_json(const HttpSettings& settings, const std::string& path, const nlohmann::json& body) {
    const Endpoint ep = split_url(settings.base_url);
    httplib::Client client(ep.origin);
    client.set_connection_timeout(settings.timeout);
    client.set_read_timeout(settings.timeout);
    client.set_write_timeout(settings.timeout);

    httplib::Headers headers;
    if (auto key = api_key(settings); !key.empty()) headers.emplace("Authorization", "Bearer " + key);

    const std::string payload = body.dump();
    std::string last_error = "no attempt made";
    auto backoff = settings.initial_backoff;
    const int attempts = std::max(1, settings.attempts);
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        auto res = client.Post(ep.path_prefix + path, headers, payload, "application/json");
        if (res && res->status >= 200 && res->status < 300) {
            try {
                return nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::exception& e) {
                last_error = std::string("invalid JSON response: ") + e.what();
            }
        } else if (res) {
            last_error = "HTTP " + std::to_string(res->status);
        } else {
            last_error = "connection failed: " + httplib::to_string(res.error());
        }
        if (attempt < attempts) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }
    throw TransportError("POST " + settings.base_url + path + " failed after " + std::to_string(attempts) +
                         " attempts: " + last_error);
}

HttpTargetBackend::HttpTargetBackend(HttpSettings settings) : settings_(std::move(settings)) {
    split_url(settings_.base_url);
}

std::vector<TokenScore> HttpTargetBackend::score_tokens(std::string_view text, const std::optional<std::string>& prefix,
                                                        int top_k) const {
    const std::string head = prefix ? *prefix : std::string();
    const std::string prompt = head + std::string(text);
    nlohmann::json body = {{"model", settings_.model}, {"prompt", prompt},     {"max_tokens", 0},
                           {"temperature", 0},         {"echo", true},         {"logprobs", std::max(top_k, 1)}};
    const auto res = post_json(settings_, "/v1/completions", body);
    try {
        const auto& lp = res.at("choices").at(0).at("logprobs");
        const auto& tokens = lp.at("tokens");
        const auto& logprobs = lp.at("token_logprobs");
        const auto& offsets = lp.at("text_offset");
        const nlohmann::json* tops = lp.contains("top_logprobs") && lp["top_logprobs"].is_array() ? &lp["top_logprobs"] : nullptr;

        std::vector<TokenScore> out;
        bool first_text_token = true;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            const auto off = offsets.at(i).get<std::size_t>();
            if (off < head.size() || off >= prompt.size()) continue;
            if (first_text_token) {
                first_text_token = false;
                continue;
            }
            if (logprobs.at(i).is_null()) continue;
            TokenScore s;
            s.token = tokens.at(i).get<std::string>();
            s.logprob = std::min(0.0, logprobs.at(i).get<double>());
            if (top_k > 0 && tops && i < tops->size() && (*tops)[i].is_object()) {
                for (const auto& [tok, v] : (*tops)[i].items()) s.top_alternatives.emplace_back(tok, std::exp(v.get<double>()));
                std::stable_sort(s.top_alternatives.begin(), s.top_alternatives.end(),
                                 [](const auto& a, const auto& b) { return a.second > b.second; });
                if (s.top_alternatives.size() > static_cast<std::size_t>(top_k)) s.top_alternatives.resize(static_cast<std::size_t>(top_k));
            }
            out.push_back(std::move(s));
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(std::string("malformed completions response: ") + e.what());
    }
}

Continuation HttpTargetBackend::generate(std::string_view prefix, int max_tokens) const {
    nlohmann::json body = {{"model", settings_.model}, {"prompt", prefix},   {"max_tokens", max_tokens},
                           {"temperature", 0},         {"logprobs", 1},      {"echo", false}};
    const auto res = post_json(settings_, "/v1/completions", body);
    try {
        const auto& choice = res.at("choices").at(0);
        Continuation c;
        c.text = choice.at("text").get<std::string>();
        const auto& lp = choice.at("logprobs");
        const auto& logprobs = lp.at("token_logprobs");
        const nlohmann::json* tops = lp.contains("top_logprobs") && lp["top_logprobs"].is_array() ? &lp["top_logprobs"] : nullptr;
        for (std::size_t i = 0; i < logprobs.size(); ++i) {
            double best = logprobs.at(i).is_null() ? -INFINITY : logprobs.at(i).get<double>();
            if (tops && i < tops->size() && (*tops)[i].is_object()) {
                for (const auto& [tok, v] : (*tops)[i].items()) best = std::max(best, v.get<double>());
            }
            if (std::isfinite(best)) c.step_max_probs.push_back(std::min(1.0, std::exp(best)));
        }
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(std::string("malformed completions response: ") + e.what());
    }
}

HttpAuxiliaryBackend::HttpAuxiliaryBackend(HttpSettings settings) : settings_(std::move(settings)) {
    split_url(settings_.base_url);
}

std::string HttpAuxiliaryBackend::chat(const std::string& content) const {
    nlohmann::json body = {{"model", settings_.model},
                           {"temperature", 0},
                           {"messages", nlohmann::json::array({{{"role", "user"}, {"content", content}}})}};
    const auto res = post_json(settings_, "/v1/chat/completions", body);
    try {
        const auto& msg = res.at("choices").at(0).at("message").at("content");
        return msg.is_null() ? std::string() : msg.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(std::string("malformed chat response: ") + e.what());
    }
}

std::string HttpAuxiliaryBackend::rewrite(std::string_view prompt, std::string_view text) const {
    return chat(std::string(prompt) + "\n\nText:\n" + std::string(text) + "\n\nReturn only the rewritten text.");
}

std::string HttpAuxiliaryBackend::instruct(std::string_view instruction, std::span<const std::string> materials) const {
    std::string content(instruction);
    for (std::size_t i = 0; i < materials.size(); ++i) {
        content += "\n\n[" + std::to_string(i + 1) + "]\n" + materials[i];
    }
    return chat(content);
}

ModelHandle make_http_target(HttpSettings settings) {
    auto id = settings.model;
    return ModelHandle(BackendKind::HttpTarget, std::move(id), {Capability::TokenLogprobs, Capability::Continuation},
                       std::make_shared<HttpTargetBackend>(std::move(settings)));
}

ModelHandle make_http_auxiliary(HttpSettings settings) {
    auto id = settings.model;
    return ModelHandle(BackendKind::HttpAuxiliary, std::move(id), {Capability::Rewrite},
                       std::make_shared<HttpAuxiliaryBackend>(std::move(settings)));
}

}  // namespace laudit::gateway
