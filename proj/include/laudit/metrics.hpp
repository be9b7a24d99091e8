#pragma once

#include "laudit/scores.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace laudit::metrics {

using detectors::ScoreVector;

/// Mann-Whitney AUC; ties count one half.
double auc(std::span<const double> members, std::span<const double> nonmembers);
double auc(const ScoreVector& v);

/// Best balanced accuracy over thresholds, deciding "member iff score >= tau"
/// with tau over the distinct scores and +/- infinity.
double asr(std::span<const double> members, std::span<const double> nonmembers);
double asr(const ScoreVector& v);

/// Largest TPR over thresholds whose empirical FPR is <= fpr_level.
double tpr_at_fpr(std::span<const double> members, std::span<const double> nonmembers, double fpr_level);
double tpr_at_fpr(const ScoreVector& v, double fpr_level);

enum class Objective { Auc, Asr, Blend };

/// Search objective. Blend is auc_weight * AUC + (1 - auc_weight) * ASR.
struct PerfConfig {
    Objective objective = Objective::Auc;
    double auc_weight = 0.5;
};

Objective objective_from_string(const std::string& s);
std::string to_string(Objective o);

double perf(const ScoreVector& v, const PerfConfig& cfg = {});

struct DetectionReport {
    double auc = 0.5;
    double asr = 0.5;
    std::map<double, double> tpr_at;  ///< fpr level -> tpr
    double perf = 0.5;
    std::string detector_id;
    std::size_t n_member = 0;
    std::size_t n_nonmember = 0;

    bool operator==(const DetectionReport&) const = default;
};

inline const std::vector<double> kDefaultFprLevels = {0.01, 0.05};

DetectionReport make_report(const ScoreVector& v, const PerfConfig& cfg = {},
                            std::span<const double> fpr_levels = kDefaultFprLevels);

nlohmann::json to_json(const DetectionReport& r);
DetectionReport report_from_json(const nlohmann::json& j);

/// CSV header/row for a report; the row is prefixed by `label`.
std::string csv_header(std::span<const double> fpr_levels = kDefaultFprLevels);
std::string csv_row(const std::string& label, const DetectionReport& r,
                    std::span<const double> fpr_levels = kDefaultFprLevels);

/// Fixed-precision rendering shared by markdown and CSV output.
std::string format_metric(double x);

}  // namespace laudit::metrics
