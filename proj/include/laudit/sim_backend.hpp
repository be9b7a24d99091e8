#pragma once

#include "laudit/gateway.hpp"
#include "laudit/ngram.hpp"

#include <memory>

namespace laudit::gateway {

/// In-process target backed by an NgramMemorizer.
class NgramBackend final : public Backend {
public:
    explicit NgramBackend(std::shared_ptr<const NgramMemorizer> model) : model_(std::move(model)) {}

    std::vector<TokenScore> score_tokens(std::string_view text, const std::optional<std::string>& prefix,
                                         int top_k) const override;
    std::vector<TokenStats> token_stats(std::string_view text, const std::optional<std::string>& prefix) const override;
    Continuation generate(std::string_view prefix, int max_tokens) const override;

    const NgramMemorizer& model() const noexcept { return *model_; }

private:
    std::shared_ptr<const NgramMemorizer> model_;
};

/// Handle of kind ngram-sim with token-logprobs, full-vocab-stats and
/// continuation capabilities.
ModelHandle make_ngram_handle(std::shared_ptr<const NgramMemorizer> model, std::string model_id);

}  // namespace laudit::gateway
