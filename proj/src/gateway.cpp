#include "laudit/gateway.hpp"

#include "laudit/errors.hpp"
#include "laudit/hashing.hpp"

namespace laudit::gateway {

std::string_view to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::HttpTarget: return "http-target";
        case BackendKind::HttpAuxiliary: return "http-auxiliary";
        case BackendKind::NgramSim: return "ngram-sim";
        case BackendKind::ScriptedAux: return "scripted-aux";
    }
    return "unknown";
}

std::string_view to_string(Capability cap) {
    switch (cap) {
        case Capability::TokenLogprobs: return "token-logprobs";
        case Capability::FullVocabStats: return "full-vocab-stats";
        case Capability::Continuation: return "continuation";
        case Capability::Rewrite: return "rewrite";
    }
    return "unknown";
}

std::vector<std::string> Capabilities::names() const {
    std::vector<std::string> out;
    for (auto c : {Capability::TokenLogprobs, Capability::FullVocabStats, Capability::Continuation, Capability::Rewrite}) {
        if (has(c)) out.emplace_back(to_string(c));
    }
    return out;
}

std::vector<TokenScore> Backend::score_tokens(std::string_view, const std::optional<std::string>&, int) const {
    throw CapabilityError("backend does not score tokens");
}
std::vector<TokenStats> Backend::token_stats(std::string_view, const std::optional<std::string>&) const {
    throw CapabilityError("backend does not expose full-vocabulary statistics");
}
Continuation Backend::generate(std::string_view, int) const {
    throw CapabilityError("backend does not generate continuations");
}
std::string Backend::rewrite(std::string_view, std::string_view) const {
    throw CapabilityError("backend does not rewrite");
}
std::string Backend::instruct(std::string_view, std::span<const std::string>) const {
    throw CapabilityError("backend does not follow instructions");
}

InFlightLimiter::InFlightLimiter(int limit) : limit_(limit), sem_(limit) {
    if (limit < 1 || limit > 4096) throw ValidationError("in-flight limit must be in [1, 4096]");
}

ModelHandle::ModelHandle(BackendKind kind, std::string model_id, Capabilities caps,
                         std::shared_ptr<const Backend> backend)
    : state_(std::make_shared<State>()) {
    if (!backend) throw ValidationError("model handle requires a backend");
    state_->kind = kind;
    state_->model_id = std::move(model_id);
    state_->caps = caps;
    state_->backend = std::move(backend);
}

void ModelHandle::require(Capability c, std::string_view op) const {
    if (!has(c)) {
        throw CapabilityError(std::string(op) + " requires capability '" + std::string(to_string(c)) + "' on model '" +
                              model_id() + "' (" + std::string(to_string(kind())) + ")");
    }
}

void ModelHandle::count_request(const std::string& op) const {
    std::lock_guard lock(state_->stats_mutex);
    ++state_->stats.requests[op];
}

CallStats ModelHandle::stats() const {
    std::lock_guard lock(state_->stats_mutex);
    return state_->stats;
}

template <typename Fn>
nlohmann::json ModelHandle::cached(const std::string& op, const nlohmann::json& args, Fn&& compute) const {
    count_request(op);
    std::string key;
    if (state_->cache) {
        key = cache_key(to_string(kind()), model_id(), op, args);
        if (auto hit = state_->cache->get(key)) {
            std::lock_guard lock(state_->stats_mutex);
            ++state_->stats.cache_hits;
            return *hit;
        }
    }
    nlohmann::json value;
    {
        std::optional<InFlightLimiter::Permit> permit;
        if (state_->limiter) permit.emplace(*state_->limiter);
        value = compute();
    }
    {
        std::lock_guard lock(state_->stats_mutex);
        ++state_->stats.backend_calls;
    }
    if (state_->cache) state_->cache->put(key, value);
    return value;
}

namespace {

nlohmann::json to_json(const std::vector<TokenScore>& scores) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : scores) {
        nlohmann::json alts = nlohmann::json::array();
        for (const auto& [tok, p] : s.top_alternatives) alts.push_back({tok, p});
        arr.push_back({{"token", s.token}, {"logprob", s.logprob}, {"top", alts}});
    }
    return arr;
}

std::vector<TokenScore> scores_from_json(const nlohmann::json& arr) {
    std::vector<TokenScore> out;
    out.reserve(arr.size());
    for (const auto& e : arr) {
        TokenScore s;
        s.token = e.at("token").get<std::string>();
        s.logprob = e.at("logprob").get<double>();
        for (const auto& a : e.at("top")) s.top_alternatives.emplace_back(a.at(0).get<std::string>(), a.at(1).get<double>());
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

std::vector<TokenScore> ModelHandle::score_tokens(std::string_view text, const std::optional<std::string>& prefix,
                                                  int top_k) const {
    require(Capability::TokenLogprobs, "score_tokens");
    if (text.empty()) throw ValidationError("score_tokens: text is empty");
    nlohmann::json args = {{"text", text}, {"top_k", top_k}};
    if (prefix) args["prefix"] = *prefix;
    auto value = cached("score_tokens", args, [&] {
        auto scores = backend().score_tokens(text, prefix, top_k);
        if (scores.empty()) throw ValidationError("score_tokens: tokenization produced zero tokens");
        return to_json(scores);
    });
    return scores_from_json(value);
}

std::vector<TokenStats> ModelHandle::token_stats(std::string_view text, const std::optional<std::string>& prefix) const {
    require(Capability::FullVocabStats, "token_stats");
    if (text.empty()) throw ValidationError("token_stats: text is empty");
    nlohmann::json args = {{"text", text}};
    if (prefix) args["prefix"] = *prefix;
    auto value = cached("token_stats", args, [&] {
        auto stats = backend().token_stats(text, prefix);
        if (stats.empty()) throw ValidationError("token_stats: tokenization produced zero tokens");
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& s : stats) arr.push_back({s.token, s.logprob, s.mean, s.stddev});
        return arr;
    });
    std::vector<TokenStats> out;
    out.reserve(value.size());
    for (const auto& e : value) {
        out.push_back({e.at(0).get<std::string>(), e.at(1).get<double>(), e.at(2).get<double>(), e.at(3).get<double>()});
    }
    return out;
}

Continuation ModelHandle::generate_continuation(std::string_view prefix, int max_tokens) const {
    require(Capability::Continuation, "generate_continuation");
    if (max_tokens < 1) throw ValidationError("generate_continuation: max_tokens must be >= 1");
    nlohmann::json args = {{"prefix", prefix}, {"max_tokens", max_tokens}};
    auto value = cached("generate_continuation", args, [&] {
        auto c = backend().generate(prefix, max_tokens);
        return nlohmann::json{{"text", c.text}, {"step_max_probs", c.step_max_probs}};
    });
    return Continuation{value.at("text").get<std::string>(), value.at("step_max_probs").get<std::vector<double>>()};
}

std::string ModelHandle::rewrite(const RewritePrompt& prompt, std::string_view text, std::string_view sample_id) const {
    require(Capability::Rewrite, "rewrite");
    nlohmann::json args = {{"prompt_sha256", prompt.hash()}, {"text_sha256", sha256_hex(text)}};
    auto value = cached("rewrite", args, [&] {
        for (int attempt = 0; attempt < 2; ++attempt) {
            std::string out = backend().rewrite(prompt.text, text);
            if (!out.empty()) return nlohmann::json(out);
        }
        throw SampleError(std::string(sample_id.empty() ? "<unnamed>" : sample_id), "auxiliary model returned an empty rewrite twice");
    });
    return value.get<std::string>();
}

std::string ModelHandle::instruct(std::string_view instruction, std::span<const std::string> materials) const {
    require(Capability::Rewrite, "instruct");
    if (materials.empty()) throw ValidationError("instruct: materials list is empty");
    nlohmann::json args = {{"instruction", instruction}, {"materials", std::vector<std::string>(materials.begin(), materials.end())}};
    auto value = cached("instruct", args, [&] {
        for (int attempt = 0; attempt < 2; ++attempt) {
            std::string out = backend().instruct(instruction, materials);
            if (!out.empty()) return nlohmann::json(out);
        }
        throw TransportError("auxiliary model returned an empty answer twice");
    });
    return value.get<std::string>();
}

}  // namespace laudit::gateway
