#pragma once

#include "laudit/harness/scenario.hpp"
#include "laudit/search.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace laudit::harness {

/// Markdown audit report. With ground truth, the true laundering prompt is
/// paired with the reversed one.
std::string render_markdown(const reversal::AuditVerdict& verdict, const reversal::SearchTrace& trace,
                            const std::optional<GroundTruth>& truth = std::nullopt);

/// Per-detector metrics on originals and on the final surrogates.
std::string metrics_csv(const reversal::AuditVerdict& verdict);

/// register, abbreviation, conf (empty when unavailable), shortlisted.
std::string conf_csv(const reversal::SearchTrace& trace);

/// iteration, perf, incumbent_perf, accepted, best_perf.
std::string iterations_csv(const reversal::SearchTrace& trace);

/// One row per evaluated prompt: stage-1 candidates, then refinement
/// iterations.
std::string prompts_csv(const reversal::SearchTrace& trace);

/// Quotes a CSV field when needed.
std::string csv_field(std::string_view s);

/// Writes verdict.json, trace.json, report.md, metrics.csv, conf.csv and
/// iterations.csv (plus ground_truth.json when known) into `dir`.
void write_outputs(const std::filesystem::path& dir, const reversal::AuditResult& result,
                   const std::optional<GroundTruth>& truth = std::nullopt);

/// Canonical serialized form used for trace.json.
std::string dump_json(const nlohmann::json& j);

void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

}  // namespace laudit::harness
