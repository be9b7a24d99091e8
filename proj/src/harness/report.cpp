#include "laudit/harness/report.hpp"

#include "laudit/errors.hpp"
#include "laudit/metrics.hpp"
#include "laudit/registers.hpp"

#include <fstream>
#include <sstream>

namespace laudit::harness {

namespace {

using metrics::format_metric;
using reversal::register_by_id;

std::string signed_metric(double x) { return (x >= 0.0 ? "+" : "") + format_metric(x); }

std::string register_label(std::optional<int> id) {
    if (!id) return "none";
    const auto& r = register_by_id(*id);
    return r.name + " (" + r.abbreviation + ")";
}

std::string md_cell(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '|') out += "\\|";
        else if (c == '\n') out += ' ';
        else out += c;
    }
    return out;
}

}  // namespace

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string render_markdown(const reversal::AuditVerdict& v, const reversal::SearchTrace& t,
                            const std::optional<GroundTruth>& truth) {
    std::ostringstream os;
    os << "# Laundering audit report\n\n";
    os << "Verdict: **" << reversal::to_string(v.verdict) << "**\n\n";
    os << "Primary detector: `" << (t.detector_id.empty() ? v.baseline_report.detector_id : t.detector_id) << "`\n\n";
    os << "| quantity | value |\n|---|---|\n";
    os << "| baseline Perf (originals) | " << format_metric(v.baseline_report.perf) << " |\n";
    os << "| best Perf (reversed) | " << format_metric(v.best_report.perf) << " |\n";
    os << "| delta | " << format_metric(v.delta) << " |\n";
    os << "| theta | " << format_metric(v.theta) << " |\n";
    os << "| margin vs baseline + delta | " << signed_metric(v.delta_margin) << " |\n";
    os << "| margin vs theta | " << signed_metric(v.theta_margin) << " |\n";
    os << "| selected register | " << register_label(v.selected_register) << " |\n\n";
    if (v.verdict == reversal::Verdict::NoEvidence) {
        os << "No evidence: the best Perf missed baseline + delta by " << signed_metric(v.delta_margin)
           << " and theta by " << signed_metric(v.theta_margin) << " (negative means missed).\n\n";
    }

    os << "## Detectors: originals vs reversed surrogates\n\n";
    os << "| detector | AUC orig | AUC rev | ASR orig | ASR rev |";
    for (double level : metrics::kDefaultFprLevels) os << " TPR@" << format_metric(level) << " orig | TPR@" << format_metric(level) << " rev |";
    os << "\n|---|---|---|---|---|";
    for (std::size_t i = 0; i < metrics::kDefaultFprLevels.size(); ++i) os << "---|---|";
    os << "\n";
    auto tpr = [](const metrics::DetectionReport& r, double level) {
        auto it = r.tpr_at.find(level);
        return it == r.tpr_at.end() ? std::string("-") : format_metric(it->second);
    };
    for (const auto& [id, base] : v.baseline_by_detector) {
        auto fin = v.final_by_detector.find(id);
        const bool has_final = fin != v.final_by_detector.end();
        os << "| " << id << " | " << format_metric(base.auc) << " | " << (has_final ? format_metric(fin->second.auc) : "-")
           << " | " << format_metric(base.asr) << " | " << (has_final ? format_metric(fin->second.asr) : "-") << " |";
        for (double level : metrics::kDefaultFprLevels) {
            os << ' ' << tpr(base, level) << " | " << (has_final ? tpr(fin->second, level) : "-") << " |";
        }
        os << "\n";
    }
    for (const auto& [id, reason] : v.skipped_detectors) os << "\nSkipped `" << id << "`: " << reason << "\n";
    os << "\nASR uses the optimistic convention: the threshold is chosen on the evaluated split itself, "
          "so it is an upper bound on held-out accuracy.\n\n";

    if (!t.confidences.empty()) {
        os << "## Register confidence\n\n| register | Conf | template |\n|---|---|---|\n";
        for (const auto& c : t.confidences) {
            os << "| " << register_by_id(c.register_id).abbreviation << " | "
               << (c.conf ? format_metric(*c.conf) : std::string("n/a")) << " | " << md_cell(c.template_text)
               << (c.template_from_fixture ? " (fixture)" : "") << " |\n";
        }
        os << "\nShortlist:";
        for (int id : t.shortlist) os << ' ' << register_by_id(id).abbreviation;
        os << "\n\n";
    }
    if (!t.candidates.empty()) {
        os << "## Register selection\n\n| register | Perf | AUC | note |\n|---|---|---|---|\n";
        for (const auto& c : t.candidates) {
            os << "| " << register_by_id(c.register_id).abbreviation << " | "
               << (c.report ? format_metric(c.report->perf) : "-") << " | " << (c.report ? format_metric(c.report->auc) : "-")
               << " | " << md_cell(c.error.empty() ? (t.selected_register == c.register_id ? "selected" : "") : c.error) << " |\n";
        }
        os << "\n";
    }
    if (!t.iterations.empty()) {
        os << "## Refinement\n\n| iteration | Perf | incumbent Perf | accepted |\n|---|---|---|---|\n";
        for (const auto& it : t.iterations) {
            os << "| " << it.index << " | " << format_metric(it.report.perf) << " | " << format_metric(it.incumbent_perf)
               << " | " << (it.accepted ? "yes" : "no") << " |\n";
        }
        os << "\n";
    }
    os << "## Prompts\n\n";
    if (t.stage1_prompt) os << "Stage-1 prompt:\n\n> " << t.stage1_prompt->text << "\n\n";
    if (v.final_prompt) os << "Reversed prompt:\n\n> " << v.final_prompt->text << "\n\n";
    if (truth) {
        os << "| Original Prompt | Reversed Prompt |\n|---|---|\n| " << md_cell(truth->laundering_prompt) << " | "
           << md_cell(v.final_prompt ? v.final_prompt->text : std::string("(none)")) << " |\n\n";
    }
    if (!t.requests.empty()) {
        os << "## Requests\n\n| model | operation | count |\n|---|---|---|\n";
        for (const auto& [role, ops] : t.requests) {
            for (const auto& [op, n] : ops) os << "| " << role << " | " << op << " | " << n << " |\n";
        }
        os << "\n";
    }
    if (!t.log.empty()) {
        os << "## Log\n\n";
        for (const auto& line : t.log) os << "- " << line << "\n";
    }
    return os.str();
}

std::string metrics_csv(const reversal::AuditVerdict& v) {
    std::string out = metrics::csv_header() + "\n";
    for (const auto& [id, r] : v.baseline_by_detector) out += metrics::csv_row("original", r) + "\n";
    for (const auto& [id, r] : v.final_by_detector) out += metrics::csv_row("reversed", r) + "\n";
    return out;
}

std::string conf_csv(const reversal::SearchTrace& t) {
    std::string out = "register_id,register,conf,shortlisted\n";
    for (const auto& c : t.confidences) {
        const bool listed = std::find(t.shortlist.begin(), t.shortlist.end(), c.register_id) != t.shortlist.end();
        out += std::to_string(c.register_id) + "," + register_by_id(c.register_id).abbreviation + "," +
               (c.conf ? format_metric(*c.conf) : std::string()) + "," + (listed ? "1" : "0") + "\n";
    }
    return out;
}

std::string iterations_csv(const reversal::SearchTrace& t) {
    std::string out = "iteration,perf,incumbent_perf,accepted,best_perf\n";
    if (t.stage1_report) out += "0," + format_metric(t.stage1_report->perf) + ",,1," + format_metric(t.stage1_report->perf) + "\n";
    for (const auto& it : t.iterations) {
        const double best = it.accepted ? it.report.perf : it.incumbent_perf;
        out += std::to_string(it.index) + "," + format_metric(it.report.perf) + "," + format_metric(it.incumbent_perf) +
               "," + (it.accepted ? "1" : "0") + "," + format_metric(best) + "\n";
    }
    return out;
}

std::string prompts_csv(const reversal::SearchTrace& t) {
    std::string out = "stage,register,iteration,accepted,prompt,perf,auc,asr\n";
    for (const auto& c : t.candidates) {
        if (!c.report) continue;
        out += "stage1," + register_by_id(c.register_id).abbreviation + ",," +
               (t.selected_register == c.register_id ? "1" : "0") + "," + csv_field(c.prompt) + "," +
               format_metric(c.report->perf) + "," + format_metric(c.report->auc) + "," + format_metric(c.report->asr) + "\n";
    }
    for (const auto& it : t.iterations) {
        out += "stage2," + (it.prompt.register_id ? register_by_id(*it.prompt.register_id).abbreviation : std::string()) +
               "," + std::to_string(it.index) + "," + (it.accepted ? "1" : "0") + "," + csv_field(it.prompt.text) + "," +
               format_metric(it.report.perf) + "," + format_metric(it.report.auc) + "," + format_metric(it.report.asr) + "\n";
    }
    return out;
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << content;
    if (!out) throw ValidationError("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_outputs(const std::filesystem::path& dir, const reversal::AuditResult& result,
                   const std::optional<GroundTruth>& truth) {
    std::filesystem::create_directories(dir);
    write_text(dir / "verdict.json", dump_json(reversal::to_json(result.verdict)));
    write_text(dir / "trace.json", dump_json(reversal::to_json(result.trace)));
    write_text(dir / "report.md", render_markdown(result.verdict, result.trace, truth));
    write_text(dir / "metrics.csv", metrics_csv(result.verdict));
    write_text(dir / "conf.csv", conf_csv(result.trace));
    write_text(dir / "iterations.csv", iterations_csv(result.trace));
    if (truth) write_text(dir / "ground_truth.json", dump_json(to_json(*truth)));
}

}  // namespace laudit::harness
