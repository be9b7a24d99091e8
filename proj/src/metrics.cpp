#include "laudit/metrics.hpp"

#include "laudit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <sstream>

namespace laudit::metrics {

namespace {

void require_nonempty(std::span<const double> members, std::span<const double> nonmembers) {
    if (members.empty() || nonmembers.empty()) throw ValidationError("metrics need non-empty member and non-member scores");
}

std::vector<double> sorted(std::span<const double> xs) {
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    return v;
}

// Number of entries of the sorted vector that are >= tau.
std::size_t count_at_least(const std::vector<double>& s, double tau) {
    return static_cast<std::size_t>(s.end() - std::lower_bound(s.begin(), s.end(), tau));
}

// Candidate thresholds: distinct observed scores, ascending, then +inf.
// -inf is equivalent to the smallest observed score (everything >= it).
std::vector<double> thresholds(std::span<const double> a, std::span<const double> b) {
    std::vector<double> t(a.begin(), a.end());
    t.insert(t.end(), b.begin(), b.end());
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    t.insert(t.begin(), -std::numeric_limits<double>::infinity());
    t.push_back(std::numeric_limits<double>::infinity());
    return t;
}

}  // namespace

double auc(std::span<const double> members, std::span<const double> nonmembers) {
    require_nonempty(members, nonmembers);
    const auto neg = sorted(nonmembers);
    // Twice the Mann-Whitney U, kept integral so the result is exact.
    std::uint64_t twice_u = 0;
    for (double x : members) {
        const auto lo = std::lower_bound(neg.begin(), neg.end(), x);
        const auto hi = std::upper_bound(lo, neg.end(), x);
        twice_u += 2 * static_cast<std::uint64_t>(lo - neg.begin()) + static_cast<std::uint64_t>(hi - lo);
    }
    return static_cast<double>(twice_u) / (2.0 * static_cast<double>(members.size()) * static_cast<double>(neg.size()));
}

double auc(const ScoreVector& v) { return auc(v.member_scores, v.nonmember_scores); }

double asr(std::span<const double> members, std::span<const double> nonmembers) {
    require_nonempty(members, nonmembers);
    const auto pos = sorted(members);
    const auto neg = sorted(nonmembers);
    const double n = static_cast<double>(pos.size());
    const double m = static_cast<double>(neg.size());
    double best = 0.0;
    for (double tau : thresholds(members, nonmembers)) {
        const double tp = static_cast<double>(count_at_least(pos, tau));
        const double tn = m - static_cast<double>(count_at_least(neg, tau));
        best = std::max(best, 0.5 * (tp / n + tn / m));
    }
    return best;
}

double asr(const ScoreVector& v) { return asr(v.member_scores, v.nonmember_scores); }

double tpr_at_fpr(std::span<const double> members, std::span<const double> nonmembers, double fpr_level) {
    require_nonempty(members, nonmembers);
    if (!(fpr_level > 0.0 && fpr_level < 1.0)) throw ValidationError("fpr level must lie in (0, 1)");
    const auto pos = sorted(members);
    const auto neg = sorted(nonmembers);
    const double n = static_cast<double>(pos.size());
    const double m = static_cast<double>(neg.size());
    double best = 0.0;
    for (double tau : thresholds(members, nonmembers)) {
        const double fpr = static_cast<double>(count_at_least(neg, tau)) / m;
        if (fpr <= fpr_level) best = std::max(best, static_cast<double>(count_at_least(pos, tau)) / n);
    }
    return best;
}

double tpr_at_fpr(const ScoreVector& v, double fpr_level) {
    return tpr_at_fpr(v.member_scores, v.nonmember_scores, fpr_level);
}

Objective objective_from_string(const std::string& s) {
    if (s == "auc") return Objective::Auc;
    if (s == "asr") return Objective::Asr;
    if (s == "blend") return Objective::Blend;
    throw ValidationError("unknown perf objective '" + s + "' (expected auc, asr or blend)");
}

std::string to_string(Objective o) {
    switch (o) {
        case Objective::Auc: return "auc";
        case Objective::Asr: return "asr";
        case Objective::Blend: return "blend";
    }
    return "auc";
}

double perf(const ScoreVector& v, const PerfConfig& cfg) {
    switch (cfg.objective) {
        case Objective::Auc: return auc(v);
        case Objective::Asr: return asr(v);
        case Objective::Blend: return cfg.auc_weight * auc(v) + (1.0 - cfg.auc_weight) * asr(v);
    }
    return auc(v);
}

DetectionReport make_report(const ScoreVector& v, const PerfConfig& cfg, std::span<const double> fpr_levels) {
    v.validate();
    DetectionReport r;
    r.auc = auc(v);
    r.asr = asr(v);
    for (double level : fpr_levels) r.tpr_at[level] = tpr_at_fpr(v, level);
    r.perf = perf(v, cfg);
    r.detector_id = v.detector_id;
    r.n_member = v.member_scores.size();
    r.n_nonmember = v.nonmember_scores.size();
    return r;
}

nlohmann::json to_json(const DetectionReport& r) {
    nlohmann::json tpr = nlohmann::json::object();
    for (const auto& [level, value] : r.tpr_at) tpr[format_metric(level)] = value;
    return {{"detector_id", r.detector_id}, {"auc", r.auc},           {"asr", r.asr},
            {"tpr_at", tpr},                {"perf", r.perf},         {"n_member", r.n_member},
            {"n_nonmember", r.n_nonmember}};
}

DetectionReport report_from_json(const nlohmann::json& j) {
    DetectionReport r;
    r.detector_id = j.at("detector_id").get<std::string>();
    r.auc = j.at("auc").get<double>();
    r.asr = j.at("asr").get<double>();
    r.perf = j.at("perf").get<double>();
    r.n_member = j.at("n_member").get<std::size_t>();
    r.n_nonmember = j.at("n_nonmember").get<std::size_t>();
    for (const auto& [level, value] : j.at("tpr_at").items()) r.tpr_at[std::stod(level)] = value.get<double>();
    return r;
}

std::string format_metric(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

std::string csv_header(std::span<const double> fpr_levels) {
    std::string h = "label,detector,auc,asr";
    for (double level : fpr_levels) h += ",tpr@" + format_metric(level);
    return h + ",perf,n_member,n_nonmember";
}

std::string csv_row(const std::string& label, const DetectionReport& r, std::span<const double> fpr_levels) {
    std::ostringstream os;
    os << label << ',' << r.detector_id << ',' << format_metric(r.auc) << ',' << format_metric(r.asr);
    for (double level : fpr_levels) {
        auto it = r.tpr_at.find(level);
        os << ',' << (it == r.tpr_at.end() ? std::string() : format_metric(it->second));
    }
    os << ',' << format_metric(r.perf) << ',' << r.n_member << ',' << r.n_nonmember;
    return os.str();
}

}  // namespace laudit::metrics
