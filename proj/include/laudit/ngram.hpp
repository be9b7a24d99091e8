#pragma once

#include "laudit/corpus.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace laudit::gateway {

/// Smoothing configuration for NgramMemorizer.
///
/// `weights` are interpolation weights, highest order first, one per order
/// (empty selects defaults; for order 3 that is 0.8/0.15/0.05). Add-alpha is
/// applied to the unigram base distribution, which gives every vocabulary
/// entry non-zero mass when alpha > 0. Higher orders use relative
/// frequencies; an order whose context was never observed drops out and the
/// remaining weights are renormalized.
struct Smoothing {
    double alpha = 0.1;
    std::vector<double> weights;
};

/// Default interpolation weights for `order`, highest order first.
std::vector<double> default_interpolation_weights(int order);

/// Interpolated n-gram model over the simulator tokenization, used as a
/// deterministic stand-in for a fine-tuned target model.
///
/// The vocabulary is every training token (sorted) followed by "<unk>" and
/// "</s>". Contexts are left-padded with a beginning-of-text marker that is
/// not itself part of the vocabulary.
class NgramMemorizer {
public:
    using TokenId = std::uint32_t;
    static constexpr TokenId kBos = std::numeric_limits<TokenId>::max();

    static NgramMemorizer train(std::span<const corpus::TextSample> samples, int order, const Smoothing& smoothing = {});
    static NgramMemorizer train_texts(std::span<const std::string> texts, int order, const Smoothing& smoothing = {});

    /// Smoothing-only model: uniform next-token distribution over
    /// `vocabulary` plus the two special tokens.
    static NgramMemorizer uniform(std::span<const std::string> vocabulary);

    /// Degenerate model that puts probability 1 on `token` at every step.
    static NgramMemorizer one_hot(const std::string& token);

    int order() const noexcept { return order_; }
    double alpha() const noexcept { return alpha_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    std::size_t vocabulary_size() const noexcept { return vocab_.size(); }
    const std::string& token(TokenId id) const { return vocab_.at(id); }
    TokenId unk_id() const noexcept { return static_cast<TokenId>(vocab_.size() - 2); }
    TokenId eos_id() const noexcept { return static_cast<TokenId>(vocab_.size() - 1); }
    std::uint64_t unigram_count(TokenId id) const { return unigram_counts_.at(id); }

    /// Maps a token to its id, or to "<unk>" when out of vocabulary.
    TokenId id(std::string_view token) const;
    std::vector<TokenId> encode(std::span<const std::string> tokens) const;

    /// P(next | history). History is the full left context; only the last
    /// order-1 ids matter and missing positions count as beginning-of-text.
    double probability(std::span<const TokenId> history, TokenId next) const;

    /// Dense next-token distribution over the vocabulary.
    std::vector<double> distribution(std::span<const TokenId> history) const;

    struct NextToken {
        TokenId token;           ///< argmax over emittable tokens (never <unk>)
        double probability;      ///< P(token | history)
        double max_probability;  ///< max over the whole vocabulary
    };
    NextToken best_next(std::span<const TokenId> history) const;

    /// Mean and standard deviation of log P(w | history) under the model's own
    /// next-token distribution (zero-probability entries contribute nothing).
    struct LogProbMoments {
        double mean;
        double stddev;
    };
    LogProbMoments log_prob_moments(std::span<const TokenId> history) const;

private:
    struct ContextStats {
        std::uint64_t total = 0;
        std::vector<std::pair<TokenId, std::uint32_t>> successors;  // sorted by id
    };
    using ContextTable = std::unordered_map<std::string, ContextStats>;

    struct ActiveContext {
        const ContextStats* stats;
        double weight;  // normalized
    };

    NgramMemorizer() = default;
    static NgramMemorizer build(const std::vector<std::vector<std::string>>& docs, int order, const Smoothing& smoothing);

    static std::string pack(std::span<const TokenId> ids);
    /// Contexts observed for this history, with normalized weights; also
    /// returns the normalized unigram weight.
    double active_contexts(std::span<const TokenId> history, std::vector<ActiveContext>& out) const;
    double unigram_prob(TokenId id) const;
    void finalize_unigram();

    int order_ = 1;
    double alpha_ = 0.1;
    std::vector<double> weights_;
    std::vector<std::string> vocab_;
    std::unordered_map<std::string, TokenId> index_;
    std::vector<std::uint64_t> unigram_counts_;
    std::uint64_t unigram_total_ = 0;
    std::vector<ContextTable> tables_;  // tables_[k] holds contexts of length k (k >= 1)

    // Cached unigram quantities.
    std::vector<TokenId> by_unigram_;  // ids sorted by count desc, id asc
    double sum_p1_logp1_ = 0.0;
    double sum_p1_logp1_sq_ = 0.0;
    double sum_p1_ = 0.0;
};

}  // namespace laudit::gateway
