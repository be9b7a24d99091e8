#include "laudit/detectors.hpp"

#include "laudit/errors.hpp"
#include "laudit/ngram.hpp"
#include "laudit/parallel.hpp"
#include "laudit/sim_backend.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace laudit::detectors {

void ScoreVector::validate() const {
    if (member_scores.empty() || nonmember_scores.empty()) throw ValidationError("score vector has an empty side");
    for (const auto* side : {&member_scores, &nonmember_scores}) {
        for (double x : *side) {
            if (!std::isfinite(x)) throw ValidationError("score vector contains a non-finite value");
        }
    }
}

nlohmann::json to_json(const ScoreVector& v) {
    return {{"detector_id", v.detector_id},       {"sign_convention", v.sign_convention},
            {"member_scores", v.member_scores},   {"nonmember_scores", v.nonmember_scores},
            {"transform_hash", v.transform_hash}, {"model_id", v.model_id}};
}

ScoreVector score_vector_from_json(const nlohmann::json& j) {
    ScoreVector v;
    v.detector_id = j.at("detector_id").get<std::string>();
    v.sign_convention = j.value("sign_convention", std::string(kHigherIsMember));
    v.member_scores = j.at("member_scores").get<std::vector<double>>();
    v.nonmember_scores = j.at("nonmember_scores").get<std::vector<double>>();
    v.transform_hash = j.value("transform_hash", std::string());
    v.model_id = j.value("model_id", std::string());
    v.validate();
    return v;
}

double mean_logprob(std::span<const double> logprobs) {
    if (logprobs.empty()) throw ValidationError("no token scores");
    double sum = 0.0;
    for (double x : logprobs) sum += x;
    return sum / static_cast<double>(logprobs.size());
}

double min_k_mean(std::span<const double> values, double k_percent) {
    if (values.empty()) throw ValidationError("no token scores");
    if (!(k_percent > 0.0 && k_percent <= 100.0)) throw ValidationError("k_percent must lie in (0, 100]");
    const std::size_t t = values.size();
    const auto keep = std::min(t, static_cast<std::size_t>(std::ceil(k_percent / 100.0 * static_cast<double>(t))));
    std::vector<std::size_t> idx(t);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    idx.resize(keep);
    std::sort(idx.begin(), idx.end());
    double sum = 0.0;
    for (std::size_t i : idx) sum += values[i];
    return sum / static_cast<double>(keep);
}

std::vector<double> minkpp_z(std::span<const gateway::TokenStats> stats) {
    std::vector<double> z;
    z.reserve(stats.size());
    for (const auto& s : stats) z.push_back(s.stddev > 0.0 ? (s.logprob - s.mean) / s.stddev : 0.0);
    return z;
}

std::size_t zlib_compressed_size(std::string_view text) {
    uLongf len = compressBound(static_cast<uLong>(text.size()));
    std::vector<Bytef> buf(len);
    const int rc = compress2(buf.data(), &len, reinterpret_cast<const Bytef*>(text.data()),
                             static_cast<uLong>(text.size()), 6);
    if (rc != Z_OK) throw Error("zlib compression failed");
    return static_cast<std::size_t>(len);
}

namespace {

std::vector<double> logprobs_of(const ModelHandle& h, std::string_view text,
                                const std::optional<std::string>& prefix = std::nullopt) {
    const auto scores = h.score_tokens(text, prefix);
    std::vector<double> lp;
    lp.reserve(scores.size());
    for (const auto& s : scores) lp.push_back(s.logprob);
    return lp;
}

}  // namespace

double loss_score(const ModelHandle& target, std::string_view text) { return mean_logprob(logprobs_of(target, text)); }

double ref_score(const ModelHandle& target, const ModelHandle& reference, std::string_view text) {
    return loss_score(target, text) - loss_score(reference, text);
}

double zlib_score(const ModelHandle& target, std::string_view text) {
    const auto lp = logprobs_of(target, text);
    const double total = mean_logprob(lp) * static_cast<double>(lp.size());
    return total / static_cast<double>(zlib_compressed_size(text));
}

double mink_score(const ModelHandle& target, std::string_view text, double k_percent) {
    return min_k_mean(logprobs_of(target, text), k_percent);
}

double minkpp_score(const ModelHandle& target, std::string_view text, double k_percent) {
    if (!target.has(gateway::Capability::FullVocabStats)) {
        throw UnsupportedDetectorError("minkpp needs full-vocabulary statistics, which model '" + target.model_id() +
                                       "' does not expose");
    }
    return min_k_mean(minkpp_z(target.token_stats(text)), k_percent);
}

std::string recall_prefix(std::span<const TextSample> shots) {
    if (shots.empty()) throw ValidationError("recall needs at least one prefix shot");
    std::string prefix;
    for (const auto& s : shots) {
        if (!prefix.empty()) prefix += "\n\n";
        prefix += s.text;
    }
    return prefix + "\n\n";
}

double recall_score(const ModelHandle& target, std::string_view text, std::span<const TextSample> shots) {
    const std::string prefix = recall_prefix(shots);
    const double uncond = mean_logprob(logprobs_of(target, text));
    const double cond = mean_logprob(logprobs_of(target, text, prefix));
    if (uncond == 0.0) return kRecallSign * 1.0;
    return kRecallSign * (cond / uncond);
}

const std::vector<std::string>& all_detector_ids() {
    static const std::vector<std::string> ids = {"loss", "ref", "zlib", "mink", "minkpp", "recall"};
    return ids;
}

Detector::Detector(DetectorConfig cfg, const Handles& handles, const CorpusSplit& split) : cfg_(std::move(cfg)) {
    const auto& ids = all_detector_ids();
    if (std::find(ids.begin(), ids.end(), cfg_.id) == ids.end()) {
        throw ValidationError("unknown detector '" + cfg_.id + "'");
    }
    if (cfg_.id == "ref" && !handles.reference) throw ValidationError("detector 'ref' needs a reference model");
    if (cfg_.id == "minkpp" && !handles.target.has(gateway::Capability::FullVocabStats)) {
        throw UnsupportedDetectorError("minkpp is unavailable on model '" + handles.target.model_id() + "' (" +
                                       std::string(gateway::to_string(handles.target.kind())) + ")");
    }
    if (cfg_.id == "recall") {
        if (cfg_.recall_shots == 0) throw ValidationError("recall needs at least one prefix shot");
        if (cfg_.recall_shots > split.held.size()) throw SizeError("not enough held samples for recall shots");
        shots_ = corpus::uniform_sample(split.held, cfg_.recall_shots, cfg_.seed);
    }
}

double Detector::score(const Handles& handles, std::string_view text) const {
    const auto& t = handles.target;
    if (cfg_.id == "loss") return loss_score(t, text);
    if (cfg_.id == "ref") return ref_score(t, *handles.reference, text);
    if (cfg_.id == "zlib") return zlib_score(t, text);
    if (cfg_.id == "mink") return mink_score(t, text, cfg_.k_percent);
    if (cfg_.id == "minkpp") return minkpp_score(t, text, cfg_.k_percent);
    return recall_score(t, text, shots_);
}

CorpusSplit synthesize(const ModelHandle& auxiliary, const CorpusSplit& split, const RewritePrompt& prompt) {
    auto rewrite_all = [&](const std::vector<TextSample>& side) {
        return parallel_map<TextSample>(side.size(), [&](std::size_t i) {
            const auto& s = side[i];
            auto out = auxiliary.rewrite(prompt, s.text, s.id);
            try {
                return corpus::make_sample(s.id, out, s.source_tag);
            } catch (const ValidationError& e) {
                throw SampleError(s.id, std::string("unusable rewrite: ") + e.what());
            }
        });
    };
    CorpusSplit out;
    out.pro = rewrite_all(split.pro);
    out.held = rewrite_all(split.held);
    return out;
}

ScoreVector score_split(const Detector& detector, const Handles& handles, const CorpusSplit& split,
                        const std::string& transform_hash) {
    auto score_all = [&](const std::vector<TextSample>& side) {
        return parallel_map<double>(side.size(), [&](std::size_t i) {
            try {
                return detector.score(handles, side[i].text);
            } catch (const SampleError&) {
                throw;
            } catch (const UnsupportedDetectorError&) {
                throw;
            } catch (const Error& e) {
                throw SampleError(side[i].id, e.what());
            }
        });
    };
    ScoreVector v;
    v.detector_id = detector.id();
    v.member_scores = score_all(split.pro);
    v.nonmember_scores = score_all(split.held);
    v.transform_hash = transform_hash;
    v.model_id = handles.target.model_id();
    v.validate();
    return v;
}

ScoreVector run_detector(const DetectorConfig& cfg, const Handles& handles, const CorpusSplit& split,
                         const std::optional<RewritePrompt>& transform) {
    split.validate();
    Detector detector(cfg, handles, split);
    if (!transform) return score_split(detector, handles, split);
    if (!handles.auxiliary) throw ValidationError("a transform needs an auxiliary model");
    return score_split(detector, handles, synthesize(*handles.auxiliary, split, *transform), transform->hash());
}

ModelHandle make_reference_handle() {
    static const auto model = [] {
        const std::string text(reference_text());
        std::vector<std::string> docs;
        for (auto& para : corpus::split_sentences(text)) docs.push_back(std::move(para));
        return std::make_shared<const gateway::NgramMemorizer>(
            gateway::NgramMemorizer::train_texts(docs, 1, gateway::Smoothing{0.1, {1.0}}));
    }();
    return gateway::make_ngram_handle(model, "reference-unigram");
}

}  // namespace laudit::detectors
