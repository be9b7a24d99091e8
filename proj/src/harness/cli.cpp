#include "laudit/harness/cli.hpp"

#include "laudit/errors.hpp"
#include "laudit/harness/config.hpp"
#include "laudit/harness/report.hpp"
#include "laudit/registers.hpp"
#include "laudit/search.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace laudit::harness {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string detector;
    std::string out = "audit-out";
    bool expect_evidence = false;
    bool no_cache = false;
};

void add_common(CLI::App* sub, Common& c, bool needs_config) {
    auto* opt = sub->add_option("--config", c.config, "audit configuration (JSON)");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", c.seed, "overrides search.seed (and the scenario seed)");
    sub->add_option("--detector", c.detector, "primary detector id");
    sub->add_option("--out", c.out, "output directory");
    sub->add_flag("--expect-evidence", c.expect_evidence, "exit 1 when the verdict is no-evidence");
    sub->add_flag("--no-cache", c.no_cache, "disable the response cache");
}

AuditConfig resolve_config(const Common& c) {
    AuditConfig cfg = c.config.empty() ? AuditConfig{} : load_config(c.config);
    if (c.seed) {
        cfg.search.seed = *c.seed;
        cfg.search.detector.seed = *c.seed;
        if (cfg.scenario) cfg.scenario->seed = *c.seed;
    }
    if (!c.detector.empty()) cfg.search.detector.id = c.detector;
    if (c.no_cache) cfg.use_cache = false;
    cfg.validate();
    return cfg;
}

int finish_audit(const Common& c, const reversal::AuditResult& result, const std::optional<GroundTruth>& truth) {
    write_outputs(c.out, result, truth);
    std::cout << "verdict: " << reversal::to_string(result.verdict.verdict) << "\n";
    std::cout << "baseline perf " << metrics::format_metric(result.verdict.baseline_report.perf) << ", best perf "
              << metrics::format_metric(result.verdict.best_report.perf) << "\n";
    std::cout << "outputs written to " << c.out << "\n";
    if (c.expect_evidence && result.verdict.verdict == reversal::Verdict::NoEvidence) return kExitNoEvidence;
    return kExitOk;
}

int cmd_ingest(const Common& c, const std::string& pro, const std::string& held) {
    corpus::CorpusSplit split;
    if (!pro.empty() || !held.empty()) {
        if (pro.empty() || held.empty()) throw ValidationError("ingest needs both --pro and --held");
        split.pro = corpus::load_jsonl(pro);
        split.held = corpus::load_jsonl(held);
    } else {
        split = prepare_runtime(resolve_config(c)).split;
    }
    split.validate();
    std::cout << "pro: " << split.pro.size() << " samples\nheld: " << split.held.size() << " samples\nok\n";
    return kExitOk;
}

int cmd_detect(const Common& c) {
    const auto cfg = resolve_config(c);
    auto rt = prepare_runtime(cfg);
    std::vector<std::string> ids = c.detector.empty() ? cfg.search.report_detectors : std::vector<std::string>{c.detector};
    fs::create_directories(c.out);
    std::string csv = metrics::csv_header() + "\n";
    json reports = json::object();
    for (const auto& id : ids) {
        auto dc = cfg.search.detector;
        dc.id = id;
        try {
            const auto r = metrics::make_report(detectors::run_detector(dc, rt.handles, rt.split), cfg.search.perf);
            csv += metrics::csv_row("original", r) + "\n";
            reports[id] = metrics::to_json(r);
            std::cout << id << ": auc " << metrics::format_metric(r.auc) << "\n";
        } catch (const Error& e) {
            if (!c.detector.empty()) throw;
            std::cerr << "skipped " << id << ": " << e.what() << "\n";
        }
    }
    write_text(fs::path(c.out) / "metrics.csv", csv);
    write_text(fs::path(c.out) / "detect.json", dump_json(reports));
    return kExitOk;
}

int cmd_stage1(const Common& c) {
    const auto cfg = resolve_config(c);
    auto rt = prepare_runtime(cfg);
    reversal::SearchTrace t;
    t.detector_id = cfg.search.detector.id;
    auto s1 = reversal::identify_register(rt.split, rt.handles, cfg.search, &t.log);
    t.confidences = s1.confidences;
    t.shortlist = s1.shortlist;
    t.candidates = s1.selection.outcomes;
    t.selected_register = s1.selection.register_id;
    t.stage1_prompt = s1.selection.prompt;
    t.stage1_report = s1.report;
    t.final_prompt = s1.selection.prompt;
    t.final_report = s1.report;
    fs::create_directories(c.out);
    write_text(fs::path(c.out) / "trace.json", dump_json(reversal::to_json(t)));
    write_text(fs::path(c.out) / "conf.csv", conf_csv(t));
    std::cout << "selected register: " << reversal::register_by_id(s1.selection.register_id).abbreviation << "\n";
    std::cout << "perf " << metrics::format_metric(s1.report.perf) << "\n";
    return kExitOk;
}

int cmd_stage2(const Common& c, const std::string& prompt_text, const std::string& trace_path) {
    const auto cfg = resolve_config(c);
    auto rt = prepare_runtime(cfg);
    reversal::SearchTrace t;
    if (!trace_path.empty()) t = reversal::trace_from_json(json::parse(read_text(trace_path)));
    t.detector_id = cfg.search.detector.id;
    RewritePrompt p0;
    if (!prompt_text.empty()) {
        p0.text = prompt_text;
        t.stage1_prompt = p0;
        t.stage1_report.reset();
    } else if (t.stage1_prompt) {
        p0 = *t.stage1_prompt;
    } else {
        throw ValidationError("stage2 needs --prompt or --trace with a stage-1 prompt");
    }
    auto ref = reversal::refine_loop(rt.split, p0, rt.handles, cfg.search, t.stage1_report, &t.log);
    t.iterations = ref.iterations;
    t.final_prompt = ref.prompt;
    t.final_report = ref.report;
    fs::create_directories(c.out);
    write_text(fs::path(c.out) / "trace.json", dump_json(reversal::to_json(t)));
    write_text(fs::path(c.out) / "iterations.csv", iterations_csv(t));
    std::cout << "final perf " << metrics::format_metric(ref.report.perf) << "\nprompt: " << ref.prompt.text << "\n";
    return kExitOk;
}

int cmd_audit(const Common& c) {
    const auto cfg = resolve_config(c);
    auto rt = prepare_runtime(cfg);
    const auto result = reversal::audit(rt.split, rt.handles, cfg.search);
    return finish_audit(c, result, rt.truth);
}

struct ScenarioFlags {
    std::string register_name;
    std::vector<std::string> rules;
    std::optional<double> fraction;
    bool negative_control = false;
};

int cmd_scenario(const Common& c, const ScenarioFlags& f) {
    auto cfg = c.config.empty() ? AuditConfig{} : load_config(c.config);
    ScenarioSpec spec = cfg.scenario.value_or(ScenarioSpec{});
    if (!f.register_name.empty()) {
        const auto* r = reversal::find_register(f.register_name);
        if (r == nullptr) throw ValidationError("unknown register '" + f.register_name + "'");
        spec.true_register_id = r->id;
    }
    if (!f.rules.empty()) spec.detail_rules = f.rules;
    if (f.fraction) spec.laundering_fraction = *f.fraction;
    if (f.negative_control) spec.negative_control = true;
    cfg.scenario = spec;
    if (c.seed) {
        cfg.search.seed = *c.seed;
        cfg.search.detector.seed = *c.seed;
        cfg.scenario->seed = *c.seed;
    }
    if (!c.detector.empty()) cfg.search.detector.id = c.detector;
    if (c.no_cache) cfg.use_cache = false;
    cfg.validate();
    auto rt = prepare_runtime(cfg);
    const auto result = reversal::audit(rt.split, rt.handles, cfg.search);
    return finish_audit(c, result, rt.truth);
}

int cmd_report(const std::string& trace_path, const std::string& verdict_path, const std::string& format,
               const std::string& out_path) {
    if (!fs::exists(trace_path)) throw ValidationError("trace not found: " + trace_path);
    const auto trace = reversal::trace_from_json(json::parse(read_text(trace_path)));
    std::string text;
    if (format == "csv") {
        text = prompts_csv(trace);
    } else {
        fs::path vp = verdict_path.empty() ? fs::path(trace_path).parent_path() / "verdict.json" : fs::path(verdict_path);
        if (!fs::exists(vp)) throw ValidationError("verdict not found: " + vp.string());
        const auto verdict = reversal::verdict_json_to_struct(json::parse(read_text(vp)));
        text = render_markdown(verdict, trace);
    }
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_text(out_path, text);
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Laundering audit: recover a rewriting prompt and test membership", "laudit"};
    app.require_subcommand(1);

    Common common;
    std::string pro, held;
    auto* ingest = app.add_subcommand("ingest", "validate corpora");
    add_common(ingest, common, false);
    ingest->add_option("--pro", pro, "pro corpus (JSONL)")->check(CLI::ExistingFile);
    ingest->add_option("--held", held, "held corpus (JSONL)")->check(CLI::ExistingFile);

    auto* detect = app.add_subcommand("detect", "baseline detectors on the original texts");
    add_common(detect, common, true);
    auto* stage1 = app.add_subcommand("stage1", "register identification");
    add_common(stage1, common, true);

    std::string prompt_text, stage_trace;
    auto* stage2 = app.add_subcommand("stage2", "details refinement from a prompt");
    add_common(stage2, common, true);
    stage2->add_option("--prompt", prompt_text, "starting prompt");
    stage2->add_option("--trace", stage_trace, "stage-1 trace.json supplying the starting prompt")->check(CLI::ExistingFile);

    auto* audit = app.add_subcommand("audit", "full audit");
    add_common(audit, common, true);

    ScenarioFlags sflags;
    auto* scenario = app.add_subcommand("scenario", "build and audit a synthetic laundering scenario");
    add_common(scenario, common, false);
    scenario->add_option("--register", sflags.register_name, "true register (name or abbreviation)");
    scenario->add_option("--rule", sflags.rules, "scripted detail rule (imagery, refrain)");
    scenario->add_option("--fraction", sflags.fraction, "laundering fraction in (0, 1]");
    scenario->add_flag("--negative-control", sflags.negative_control, "train on disjoint laundered text");

    std::string trace_path, verdict_path, format = "markdown", report_out;
    auto* report = app.add_subcommand("report", "render a stored trace");
    report->add_option("--trace", trace_path, "trace.json")->required();
    report->add_option("--verdict", verdict_path, "verdict.json (markdown only; defaults next to the trace)");
    report->add_option("--format", format, "markdown or csv")->check(CLI::IsMember({"markdown", "csv"}));
    report->add_option("--out", report_out, "output file (default: standard output)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (*ingest) return cmd_ingest(common, pro, held);
        if (*detect) return cmd_detect(common);
        if (*stage1) return cmd_stage1(common);
        if (*stage2) return cmd_stage2(common, prompt_text, stage_trace);
        if (*audit) return cmd_audit(common);
        if (*scenario) return cmd_scenario(common, sflags);
        if (*report) return cmd_report(trace_path, verdict_path, format, report_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

}  // namespace laudit::harness
