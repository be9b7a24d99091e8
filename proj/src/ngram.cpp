#include "laudit/ngram.hpp"

#include "laudit/errors.hpp"
#include "laudit/tokenizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <set>

namespace laudit::gateway {

std::vector<double> default_interpolation_weights(int order) {
    switch (order) {
        case 1: return {1.0};
        case 2: return {0.8, 0.2};
        case 3: return {0.8, 0.15, 0.05};
        default: {
            // 0.8 on the highest order, the rest split geometrically.
            std::vector<double> w(static_cast<std::size_t>(order));
            w[0] = 0.8;
            double rest = 0.2;
            for (int k = 1; k < order; ++k) {
                w[static_cast<std::size_t>(k)] = (k + 1 == order) ? rest : rest * 0.75;
                rest -= w[static_cast<std::size_t>(k)];
            }
            return w;
        }
    }
}

std::string NgramMemorizer::pack(std::span<const TokenId> ids) {
    std::string key(ids.size() * sizeof(TokenId), '\0');
    std::memcpy(key.data(), ids.data(), key.size());
    return key;
}

NgramMemorizer NgramMemorizer::train(std::span<const corpus::TextSample> samples, int order, const Smoothing& smoothing) {
    std::vector<std::string> texts;
    texts.reserve(samples.size());
    for (const auto& s : samples) texts.push_back(s.text);
    return train_texts(texts, order, smoothing);
}

NgramMemorizer NgramMemorizer::train_texts(std::span<const std::string> texts, int order, const Smoothing& smoothing) {
    if (texts.empty()) throw ValidationError("cannot train an n-gram model on an empty sample list");
    std::vector<std::vector<std::string>> docs;
    docs.reserve(texts.size());
    for (const auto& t : texts) docs.push_back(tokenize(t));
    return build(docs, order, smoothing);
}

NgramMemorizer NgramMemorizer::build(const std::vector<std::vector<std::string>>& docs, int order,
                                     const Smoothing& smoothing) {
    if (order < 1) throw ValidationError("n-gram order must be >= 1");
    if (smoothing.alpha < 0.0 || !std::isfinite(smoothing.alpha)) throw ValidationError("alpha must be finite and >= 0");

    NgramMemorizer m;
    m.order_ = order;
    m.alpha_ = smoothing.alpha;
    m.weights_ = smoothing.weights.empty() ? default_interpolation_weights(order) : smoothing.weights;
    if (m.weights_.size() != static_cast<std::size_t>(order)) {
        throw ValidationError("expected " + std::to_string(order) + " interpolation weights");
    }
    double wsum = 0.0;
    for (double w : m.weights_) {
        if (w < 0.0 || !std::isfinite(w)) throw ValidationError("interpolation weights must be non-negative");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-9) throw ValidationError("interpolation weights must sum to 1");
    if (m.weights_.back() <= 0.0) throw ValidationError("the unigram interpolation weight must be positive");

    std::set<std::string> distinct;
    for (const auto& d : docs)
        for (const auto& t : d) distinct.insert(t);
    m.vocab_.assign(distinct.begin(), distinct.end());
    m.vocab_.push_back("<unk>");
    m.vocab_.push_back("</s>");
    for (TokenId i = 0; i < m.vocab_.size(); ++i) m.index_.emplace(m.vocab_[i], i);
    m.unigram_counts_.assign(m.vocab_.size(), 0);
    m.tables_.resize(static_cast<std::size_t>(order));

    // Accumulate successor counts in ordered maps, then flatten.
    std::vector<std::unordered_map<std::string, std::map<TokenId, std::uint32_t>>> raw(static_cast<std::size_t>(order));
    std::vector<TokenId> padded;
    for (const auto& d : docs) {
        padded.assign(static_cast<std::size_t>(order - 1), kBos);
        for (const auto& t : d) padded.push_back(m.index_.at(t));
        padded.push_back(m.eos_id());
        for (std::size_t pos = static_cast<std::size_t>(order - 1); pos < padded.size(); ++pos) {
            const TokenId next = padded[pos];
            ++m.unigram_counts_[next];
            ++m.unigram_total_;
            for (int k = 1; k < order; ++k) {
                std::span<const TokenId> ctx(padded.data() + pos - static_cast<std::size_t>(k), static_cast<std::size_t>(k));
                ++raw[static_cast<std::size_t>(k)][pack(ctx)][next];
            }
        }
    }
    for (int k = 1; k < order; ++k) {
        auto& table = m.tables_[static_cast<std::size_t>(k)];
        table.reserve(raw[static_cast<std::size_t>(k)].size());
        for (auto& [key, succ] : raw[static_cast<std::size_t>(k)]) {
            ContextStats stats;
            stats.successors.reserve(succ.size());
            for (auto [id, c] : succ) {
                stats.successors.emplace_back(id, c);
                stats.total += c;
            }
            table.emplace(key, std::move(stats));
        }
    }
    m.finalize_unigram();
    return m;
}

NgramMemorizer NgramMemorizer::uniform(std::span<const std::string> vocabulary) {
    NgramMemorizer m;
    m.order_ = 1;
    m.alpha_ = 1.0;
    m.weights_ = {1.0};
    std::set<std::string> distinct(vocabulary.begin(), vocabulary.end());
    m.vocab_.assign(distinct.begin(), distinct.end());
    m.vocab_.push_back("<unk>");
    m.vocab_.push_back("</s>");
    for (TokenId i = 0; i < m.vocab_.size(); ++i) m.index_.emplace(m.vocab_[i], i);
    m.unigram_counts_.assign(m.vocab_.size(), 0);
    m.tables_.resize(1);
    m.finalize_unigram();
    return m;
}

NgramMemorizer NgramMemorizer::one_hot(const std::string& token) {
    NgramMemorizer m;
    m.order_ = 1;
    m.alpha_ = 0.0;
    m.weights_ = {1.0};
    m.vocab_ = {token, "<unk>", "</s>"};
    for (TokenId i = 0; i < m.vocab_.size(); ++i) m.index_.emplace(m.vocab_[i], i);
    m.unigram_counts_ = {1, 0, 0};
    m.unigram_total_ = 1;
    m.tables_.resize(1);
    m.finalize_unigram();
    return m;
}

void NgramMemorizer::finalize_unigram() {
    const double denom = static_cast<double>(unigram_total_) + alpha_ * static_cast<double>(vocab_.size());
    if (denom <= 0.0) throw ValidationError("degenerate unigram distribution (no counts and alpha = 0)");
    by_unigram_.resize(vocab_.size());
    std::iota(by_unigram_.begin(), by_unigram_.end(), TokenId{0});
    std::stable_sort(by_unigram_.begin(), by_unigram_.end(),
                     [&](TokenId a, TokenId b) { return unigram_counts_[a] > unigram_counts_[b]; });
    sum_p1_ = sum_p1_logp1_ = sum_p1_logp1_sq_ = 0.0;
    for (TokenId i = 0; i < vocab_.size(); ++i) {
        const double p = unigram_prob(i);
        if (p <= 0.0) continue;
        const double lp = std::log(p);
        sum_p1_ += p;
        sum_p1_logp1_ += p * lp;
        sum_p1_logp1_sq_ += p * lp * lp;
    }
}

double NgramMemorizer::unigram_prob(TokenId id) const {
    return (static_cast<double>(unigram_counts_[id]) + alpha_) /
           (static_cast<double>(unigram_total_) + alpha_ * static_cast<double>(vocab_.size()));
}

NgramMemorizer::TokenId NgramMemorizer::id(std::string_view token) const {
    auto it = index_.find(std::string(token));
    return it == index_.end() ? unk_id() : it->second;
}

std::vector<NgramMemorizer::TokenId> NgramMemorizer::encode(std::span<const std::string> tokens) const {
    std::vector<TokenId> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) ids.push_back(id(t));
    return ids;
}

double NgramMemorizer::active_contexts(std::span<const TokenId> history, std::vector<ActiveContext>& out) const {
    out.clear();
    std::vector<TokenId> ctx;
    double used = weights_.back();
    for (int k = order_ - 1; k >= 1; --k) {
        ctx.assign(static_cast<std::size_t>(k), kBos);
        const std::size_t have = std::min(history.size(), static_cast<std::size_t>(k));
        std::copy(history.end() - static_cast<std::ptrdiff_t>(have), history.end(),
                  ctx.end() - static_cast<std::ptrdiff_t>(have));
        const auto& table = tables_[static_cast<std::size_t>(k)];
        auto it = table.find(pack(ctx));
        if (it == table.end()) continue;
        const double w = weights_[static_cast<std::size_t>(order_ - 1 - k)];
        if (w <= 0.0) continue;
        out.push_back({&it->second, w});
        used += w;
    }
    for (auto& a : out) a.weight /= used;
    return weights_.back() / used;
}

double NgramMemorizer::probability(std::span<const TokenId> history, TokenId next) const {
    thread_local std::vector<ActiveContext> active;
    const double u = active_contexts(history, active);
    double p = u * unigram_prob(next);
    for (const auto& a : active) {
        auto it = std::lower_bound(a.stats->successors.begin(), a.stats->successors.end(), next,
                                   [](const auto& e, TokenId id) { return e.first < id; });
        if (it != a.stats->successors.end() && it->first == next) {
            p += a.weight * static_cast<double>(it->second) / static_cast<double>(a.stats->total);
        }
    }
    return p;
}

std::vector<double> NgramMemorizer::distribution(std::span<const TokenId> history) const {
    thread_local std::vector<ActiveContext> active;
    const double u = active_contexts(history, active);
    std::vector<double> dist(vocab_.size());
    for (TokenId i = 0; i < vocab_.size(); ++i) dist[i] = u * unigram_prob(i);
    for (const auto& a : active) {
        for (auto [id, c] : a.stats->successors) {
            dist[id] += a.weight * static_cast<double>(c) / static_cast<double>(a.stats->total);
        }
    }
    return dist;
}

NgramMemorizer::NextToken NgramMemorizer::best_next(std::span<const TokenId> history) const {
    thread_local std::vector<ActiveContext> active;
    thread_local std::vector<TokenId> candidates;
    const double u = active_contexts(history, active);
    candidates.clear();
    for (const auto& a : active)
        for (auto [id, c] : a.stats->successors) candidates.push_back(id);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    auto prob = [&](TokenId id) {
        double p = u * unigram_prob(id);
        for (const auto& a : active) {
            auto it = std::lower_bound(a.stats->successors.begin(), a.stats->successors.end(), id,
                                       [](const auto& e, TokenId x) { return e.first < x; });
            if (it != a.stats->successors.end() && it->first == id) {
                p += a.weight * static_cast<double>(it->second) / static_cast<double>(a.stats->total);
            }
        }
        return p;
    };
    auto better = [](double p, TokenId id, double best_p, TokenId best_id) {
        return p > best_p || (p == best_p && id < best_id);
    };

    const TokenId none = kBos;
    TokenId emit = none;
    double emit_p = -1.0;
    TokenId any = none;
    double any_p = -1.0;
    for (TokenId id : candidates) {
        const double p = prob(id);
        if (better(p, id, any_p, any)) {
            any = id;
            any_p = p;
        }
        if (id != unk_id() && better(p, id, emit_p, emit)) {
            emit = id;
            emit_p = p;
        }
    }
    // Outside the candidate set P is proportional to the unigram estimate, so
    // the first non-candidate in unigram order is the best there.
    bool found_any = false;
    for (TokenId id : by_unigram_) {
        if (std::binary_search(candidates.begin(), candidates.end(), id)) continue;
        const double p = u * unigram_prob(id);
        if (!found_any) {
            found_any = true;
            if (better(p, id, any_p, any)) {
                any = id;
                any_p = p;
            }
        }
        if (id == unk_id()) continue;
        if (better(p, id, emit_p, emit)) {
            emit = id;
            emit_p = p;
        }
        break;
    }
    return NextToken{emit, emit_p, any_p};
}

NgramMemorizer::LogProbMoments NgramMemorizer::log_prob_moments(std::span<const TokenId> history) const {
    thread_local std::vector<ActiveContext> active;
    thread_local std::vector<TokenId> candidates;
    const double u = active_contexts(history, active);
    candidates.clear();
    for (const auto& a : active)
        for (auto [id, c] : a.stats->successors) candidates.push_back(id);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    double m1 = 0.0;
    double m2 = 0.0;
    double c_p1 = 0.0, c_p1l = 0.0, c_p1l2 = 0.0;
    for (TokenId id : candidates) {
        const double p1 = unigram_prob(id);
        if (p1 > 0.0) {
            const double l = std::log(p1);
            c_p1 += p1;
            c_p1l += p1 * l;
            c_p1l2 += p1 * l * l;
        }
        const double p = probability(history, id);
        if (p > 0.0) {
            const double lp = std::log(p);
            m1 += p * lp;
            m2 += p * lp * lp;
        }
    }
    // Non-candidates have p = u * P1, so their contribution follows from the
    // precomputed unigram sums minus the candidates' share.
    if (u > 0.0) {
        const double lu = std::log(u);
        const double rest_p1 = sum_p1_ - c_p1;
        const double rest_l = sum_p1_logp1_ - c_p1l;
        const double rest_l2 = sum_p1_logp1_sq_ - c_p1l2;
        m1 += u * (lu * rest_p1 + rest_l);
        m2 += u * (lu * lu * rest_p1 + 2.0 * lu * rest_l + rest_l2);
    }
    double var = m2 - m1 * m1;
    // Cancellation noise on (near-)uniform distributions is not real spread.
    if (var <= 1e-12 * std::max(1.0, m1 * m1)) var = 0.0;
    return LogProbMoments{m1, std::sqrt(var)};
}

}  // namespace laudit::gateway
