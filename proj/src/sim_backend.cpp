#include "laudit/sim_backend.hpp"

#include "laudit/tokenizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace laudit::gateway {

namespace {

std::vector<NgramMemorizer::TokenId> history_for(const NgramMemorizer& m, const std::optional<std::string>& prefix) {
    if (!prefix) return {};
    return m.encode(tokenize(*prefix));
}

}  // namespace

std::vector<TokenScore> NgramBackend::score_tokens(std::string_view text, const std::optional<std::string>& prefix,
                                                   int top_k) const {
    const auto tokens = tokenize(text);
    auto history = history_for(*model_, prefix);
    std::vector<TokenScore> out;
    out.reserve(tokens.size());
    for (const auto& tok : tokens) {
        const auto id = model_->id(tok);
        TokenScore s;
        s.token = tok;
        s.logprob = std::log(model_->probability(history, id));
        if (top_k > 0) {
            const auto dist = model_->distribution(history);
            std::vector<NgramMemorizer::TokenId> order(dist.size());
            std::iota(order.begin(), order.end(), NgramMemorizer::TokenId{0});
            const auto k = std::min<std::size_t>(static_cast<std::size_t>(top_k), order.size());
            std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                              [&](auto a, auto b) { return dist[a] > dist[b] || (dist[a] == dist[b] && a < b); });
            for (std::size_t i = 0; i < k; ++i) s.top_alternatives.emplace_back(model_->token(order[i]), dist[order[i]]);
        }
        out.push_back(std::move(s));
        history.push_back(id);
    }
    return out;
}

std::vector<TokenStats> NgramBackend::token_stats(std::string_view text, const std::optional<std::string>& prefix) const {
    const auto tokens = tokenize(text);
    auto history = history_for(*model_, prefix);
    std::vector<TokenStats> out;
    out.reserve(tokens.size());
    for (const auto& tok : tokens) {
        const auto id = model_->id(tok);
        const auto moments = model_->log_prob_moments(history);
        out.push_back({tok, std::log(model_->probability(history, id)), moments.mean, moments.stddev});
        history.push_back(id);
    }
    return out;
}

Continuation NgramBackend::generate(std::string_view prefix, int max_tokens) const {
    auto history = model_->encode(tokenize(prefix));
    std::vector<std::string> generated;
    Continuation c;
    for (int step = 0; step < max_tokens; ++step) {
        const auto next = model_->best_next(history);
        c.step_max_probs.push_back(next.max_probability);
        if (next.token == model_->eos_id()) break;
        generated.push_back(model_->token(next.token));
        history.push_back(next.token);
    }
    c.text = detokenize(generated);
    return c;
}

ModelHandle make_ngram_handle(std::shared_ptr<const NgramMemorizer> model, std::string model_id) {
    auto backend = std::make_shared<NgramBackend>(std::move(model));
    return ModelHandle(BackendKind::NgramSim, std::move(model_id),
                       {Capability::TokenLogprobs, Capability::FullVocabStats, Capability::Continuation},
                       std::move(backend));
}

}  // namespace laudit::gateway
