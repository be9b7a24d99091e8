#pragma once

#include "laudit/corpus.hpp"
#include "laudit/detectors.hpp"
#include "laudit/metrics.hpp"
#include "laudit/prompt.hpp"
#include "laudit/registers.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace laudit::reversal {

using corpus::CorpusSplit;
using corpus::TextSample;
using detectors::Handles;
using gateway::ModelHandle;
using metrics::DetectionReport;

// Instructions sent to the auxiliary model.
inline constexpr const char* kStandardPromptInstruction = "Give me a prompt that can transfer text into register ";
inline constexpr const char* kTemplateInstruction = "Extract a common template.";
inline constexpr const char* kRewriteAsTemplateInstruction =
    "Rewrite the sentence as the template. Fill each bracketed placeholder of the template, in order, with content "
    "taken from the sentence, and keep every other word of the template unchanged. Return only the rewritten "
    "sentence.";
inline constexpr const char* kEditInstruction =
    "Editing the prompt enables the transformation of the first text into the second text. Return the edited "
    "prompt only.";
inline constexpr const char* kDistillInstruction = "Extract a common prompt.";

/// Full standard-prompt request for a register, e.g. "... into register Lyrical.".
std::string standard_prompt_request(const Register& r);

struct SearchConfig {
    std::size_t n = 10;  ///< openings used to extract T_r
    std::size_t m = 5;   ///< openings scored for Conf(r)
    std::size_t l = 5;   ///< samples per condition-inference round
    int K = 10;          ///< refinement budget
    std::size_t top_k = 5;
    std::uint64_t seed = 0;
    int max_tokens = 64;
    int patience = 3;  ///< consecutive rejections before stopping
    /// When set, select_register scores this many pro and held samples
    /// (drawn with the search seed) instead of the full split.
    std::optional<std::size_t> select_subsample;
    detectors::DetectorConfig detector;
    metrics::PerfConfig perf;
    double delta = 0.05;
    double theta = 0.65;
    /// Detectors reported side by side in the final audit report.
    std::vector<std::string> report_detectors = detectors::all_detector_ids();

    void validate(const CorpusSplit& split) const;
};

struct RegisterConfidence {
    int register_id = 0;
    std::string template_text;
    bool template_from_fixture = false;
    std::optional<double> conf;  ///< empty when every continuation was empty
    std::size_t samples_used = 0;
};

struct CandidateOutcome {
    int register_id = 0;
    std::string prompt;  ///< standard prompt evaluated
    std::optional<DetectionReport> report;
    std::string error;  ///< non-empty when disqualified
};

struct IterationRecord {
    int index = 0;  ///< 1-based; 0 denotes the stage-1 prompt in reports
    RewritePrompt prompt;
    std::vector<std::string> proposals;  ///< H, the per-sample edit answers
    DetectionReport report;
    bool accepted = false;
    double incumbent_perf = 0.0;  ///< Perf of the incumbent before this iteration
};

/// Everything the search did, in a deterministic order.
struct SearchTrace {
    std::string detector_id;
    std::string rewrite_as_template_instruction = kRewriteAsTemplateInstruction;
    std::vector<RegisterConfidence> confidences;
    std::vector<int> shortlist;
    std::vector<CandidateOutcome> candidates;
    std::optional<int> selected_register;
    std::optional<RewritePrompt> stage1_prompt;
    std::optional<DetectionReport> stage1_report;
    std::vector<IterationRecord> iterations;
    std::optional<RewritePrompt> final_prompt;
    std::optional<DetectionReport> final_report;
    std::map<std::string, std::map<std::string, std::uint64_t>> requests;  ///< model role -> op -> count
    std::vector<std::string> log;
};

nlohmann::json to_json(const SearchTrace& t);
SearchTrace trace_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RewritePrompt& p);
RewritePrompt prompt_from_json(const nlohmann::json& j);

/// Generation-0 prompt per register. Failing registers are logged and
/// skipped; at least one must succeed.
std::map<int, RewritePrompt> build_standard_prompts(const ModelHandle& aux, const std::vector<Register>& registers,
                                                    std::vector<std::string>* log = nullptr);

/// T_r from the first sentences of n rewritten pro samples; falls back to the
/// register's fixture when extraction fails or yields no placeholder.
OpeningTemplate build_opening_template(const ModelHandle& aux, const Register& reg, const RewritePrompt& standard,
                                       std::span<const TextSample> pro, const SearchConfig& cfg,
                                       std::vector<std::string>* log = nullptr);

/// Conf(r): mean over m sampled openings rewritten as T_r of the mean
/// per-step max next-token probability of the target's greedy continuation.
/// Empty continuations are skipped; if all are empty, throws ValidationError.
double register_confidence(const ModelHandle& target, const ModelHandle& aux, const Register& reg,
                           const OpeningTemplate& tmpl, std::span<const TextSample> pro, const SearchConfig& cfg,
                           std::size_t* used = nullptr, std::vector<std::string>* log = nullptr);

/// Top-k register ids by Conf, descending; ties to the smaller id.
std::vector<int> shortlist(const std::map<int, double>& conf, std::size_t top_k);

/// Perf of p: rewrite pro and held with the auxiliary model, run the
/// configured detector on the target.
DetectionReport evaluate_prompt(const CorpusSplit& split, const RewritePrompt& p, const Handles& handles,
                                const SearchConfig& cfg);

struct Selection {
    int register_id = 0;
    RewritePrompt prompt;
    std::vector<CandidateOutcome> outcomes;  ///< in candidate order
};

/// Argmax of Perf over candidates (ties to the smaller id). Candidates whose
/// synthesis or scoring fails are disqualified; all disqualified throws.
Selection select_register(const std::vector<int>& candidates, const std::map<int, RewritePrompt>& prompts,
                          const Handles& handles, const CorpusSplit& split, const SearchConfig& cfg);

struct Inference {
    RewritePrompt prompt;
    std::vector<std::string> proposals;
};

/// One round of details inference. `round` varies the sample draw between
/// refinement iterations.
Inference condition_inference(std::span<const TextSample> pro, const RewritePrompt& p, const ModelHandle& target,
                              const ModelHandle& aux, const SearchConfig& cfg, int round = 0,
                              std::vector<std::string>* log = nullptr);

struct Refinement {
    RewritePrompt prompt;
    DetectionReport report;
    std::vector<IterationRecord> iterations;
};

/// Up to K rounds of condition_inference + evaluate_prompt, keeping p' only
/// on strict Perf improvement and stopping after `patience` rejections in a row.
Refinement refine_loop(const CorpusSplit& split, const RewritePrompt& p0, const Handles& handles,
                       const SearchConfig& cfg, std::optional<DetectionReport> p0_report = std::nullopt,
                       std::vector<std::string>* log = nullptr);

struct Stage1 {
    std::map<int, RewritePrompt> standard_prompts;
    std::vector<RegisterConfidence> confidences;
    std::vector<int> shortlist;
    Selection selection;
    DetectionReport report;
};

/// Goal identification: standard prompts, templates, Conf, shortlist, selection.
Stage1 identify_register(const CorpusSplit& split, const Handles& handles, const SearchConfig& cfg,
                         std::vector<std::string>* log = nullptr);

enum class Verdict { LaunderingEvidence, DirectMembership, NoEvidence };
std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

/// Pure decision rule: direct-membership when baseline >= theta; otherwise
/// laundering-evidence when best >= baseline + delta and best >= theta.
Verdict decide_verdict(double baseline_perf, double best_perf, double delta, double theta);

struct AuditVerdict {
    Verdict verdict = Verdict::NoEvidence;
    DetectionReport baseline_report;
    DetectionReport best_report;
    std::optional<int> selected_register;
    std::optional<RewritePrompt> final_prompt;
    double delta = 0.05;
    double theta = 0.65;
    /// best - (baseline + delta) and best - theta; negative means missed.
    double delta_margin = 0.0;
    double theta_margin = 0.0;
    /// Per-detector reports on originals and on the final surrogates.
    std::map<std::string, DetectionReport> baseline_by_detector;
    std::map<std::string, DetectionReport> final_by_detector;
    std::map<std::string, std::string> skipped_detectors;  ///< id -> reason
    std::string trace_ref = "trace.json";
};

nlohmann::json to_json(const AuditVerdict& v);
AuditVerdict verdict_json_to_struct(const nlohmann::json& j);

struct AuditResult {
    AuditVerdict verdict;
    SearchTrace trace;
};

/// Baseline on originals, then (unless the baseline already reaches theta)
/// stage 1 and stage 2, then the verdict.
AuditResult audit(const CorpusSplit& split, const Handles& handles, const SearchConfig& cfg);

}  // namespace laudit::reversal
