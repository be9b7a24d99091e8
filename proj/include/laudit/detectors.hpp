#pragma once

#include "laudit/corpus.hpp"
#include "laudit/gateway.hpp"
#include "laudit/scores.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace laudit::detectors {

using corpus::CorpusSplit;
using corpus::TextSample;
using gateway::ModelHandle;

/// Orientation of the raw ReCaLL ratio LL_cond / LL_uncond. Calibrated on
/// the memorizer harness, where members show the larger ratio.
inline constexpr double kRecallSign = +1.0;

// Pure reductions over per-token values.
double mean_logprob(std::span<const double> logprobs);
/// Mean of the ceil(k_percent/100 * T) smallest values. Selected entries are
/// summed in their original order so k = 100 reproduces mean_logprob().
double min_k_mean(std::span<const double> values, double k_percent);
/// Min-K++ z-scores; positions with zero stddev give 0.
std::vector<double> minkpp_z(std::span<const gateway::TokenStats> stats);

/// DEFLATE (zlib framing, level 6) byte length.
std::size_t zlib_compressed_size(std::string_view text);

double loss_score(const ModelHandle& target, std::string_view text);
double ref_score(const ModelHandle& target, const ModelHandle& reference, std::string_view text);
double zlib_score(const ModelHandle& target, std::string_view text);
double mink_score(const ModelHandle& target, std::string_view text, double k_percent = 20.0);
double minkpp_score(const ModelHandle& target, std::string_view text, double k_percent = 20.0);
/// Concatenated shots separated by a blank line.
std::string recall_prefix(std::span<const TextSample> shots);
double recall_score(const ModelHandle& target, std::string_view text, std::span<const TextSample> shots);

const std::vector<std::string>& all_detector_ids();

/// Model handles available to a detection run. The reference model backs
/// "ref"; the auxiliary model performs transforms.
struct Handles {
    ModelHandle target;
    std::optional<ModelHandle> reference;
    std::optional<ModelHandle> auxiliary;
};

struct DetectorConfig {
    std::string id = "loss";
    double k_percent = 20.0;
    std::size_t recall_shots = 5;
    std::uint64_t seed = 0;  ///< drives the recall shot draw
};

/// A detector bound to its configuration and, for recall, to a fixed shot
/// set drawn once from the held split.
class Detector {
public:
    Detector(DetectorConfig cfg, const Handles& handles, const CorpusSplit& split);

    const std::string& id() const noexcept { return cfg_.id; }
    const DetectorConfig& config() const noexcept { return cfg_; }
    const std::vector<TextSample>& shots() const noexcept { return shots_; }

    double score(const Handles& handles, std::string_view text) const;

private:
    DetectorConfig cfg_;
    std::vector<TextSample> shots_;
};

/// Split with every text replaced by its rewrite under `prompt`. Rewrites
/// run concurrently; any failure aborts with the sample id.
CorpusSplit synthesize(const ModelHandle& auxiliary, const CorpusSplit& split, const RewritePrompt& prompt);

/// Scores an already prepared split (no transform).
ScoreVector score_split(const Detector& detector, const Handles& handles, const CorpusSplit& split,
                        const std::string& transform_hash = {});

/// Scores the split, optionally after rewriting it with the auxiliary model.
ScoreVector run_detector(const DetectorConfig& cfg, const Handles& handles, const CorpusSplit& split,
                         const std::optional<RewritePrompt>& transform = std::nullopt);

/// Unigram reference model trained on a bundled public-domain text.
ModelHandle make_reference_handle();
std::string_view reference_text();

}  // namespace laudit::detectors
