#include "laudit/corpus.hpp"
#include "laudit/harness/cli.hpp"
#include "laudit/harness/report.hpp"
#include "laudit/harness/scenario.hpp"
#include "laudit/metrics.hpp"
#include "laudit/search.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

namespace fs = std::filesystem;
using namespace laudit;
using namespace laudit::harness;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("laudit_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run_cli({"frobnicate"}), kExitError);
    EXPECT_EQ(run_cli(std::vector<std::string>{}), kExitError);
    EXPECT_EQ(run_cli({"audit", "--config", "/nonexistent/audit.json"}), kExitError);
    EXPECT_EQ(run_cli({"scenario", "--register", "sonnet"}), kExitError);
    EXPECT_EQ(run_cli({"scenario", "--fraction", "0"}), kExitError);
    EXPECT_EQ(run_cli({"report"}), kExitError);
    EXPECT_EQ(run_cli({"--help"}), kExitOk);
}

TEST(Cli, ScenarioWritesArtifactsAndReportsAgree) {
    const auto out = fresh_dir("scenario");
    ASSERT_EQ(run_cli({"scenario", "--register", "ly", "--expect-evidence", "--out", out.string()}), kExitOk);
    for (const char* f : {"verdict.json", "trace.json", "report.md", "metrics.csv", "conf.csv", "iterations.csv",
                          "ground_truth.json"}) {
        EXPECT_TRUE(fs::exists(out / f)) << f;
    }
    const auto verdict = nlohmann::json::parse(slurp(out / "verdict.json"));
    EXPECT_EQ(verdict.at("verdict"), "laundering-evidence");
    const auto trace = reversal::trace_from_json(nlohmann::json::parse(slurp(out / "trace.json")));

    const auto md = slurp(out / "report.md");
    const auto v = reversal::verdict_json_to_struct(verdict);
    EXPECT_NE(md.find(metrics::format_metric(v.best_report.perf)), std::string::npos);
    EXPECT_NE(md.find(metrics::format_metric(v.baseline_report.perf)), std::string::npos);
    EXPECT_NE(md.find(metrics::format_metric(v.final_by_detector.at(v.best_report.detector_id).auc)), std::string::npos);

    const auto csv_path = out / "prompts.csv";
    ASSERT_EQ(run_cli({"report", "--trace", (out / "trace.json").string(), "--format", "csv", "--out", csv_path.string()}),
              kExitOk);
    const auto csv = slurp(csv_path);
    std::size_t evaluated = trace.iterations.size();
    for (const auto& c : trace.candidates) evaluated += c.report ? 1 : 0;
    EXPECT_EQ(count_lines(csv), evaluated + 1);
    EXPECT_NE(csv.find(metrics::format_metric(trace.stage1_report->perf)), std::string::npos);

    const auto md_path = out / "again.md";
    ASSERT_EQ(run_cli({"report", "--trace", (out / "trace.json").string(), "--out", md_path.string()}), kExitOk);
    EXPECT_EQ(slurp(md_path), render_markdown(v, trace));
    fs::remove_all(out);
}

TEST(Cli, NegativeControlWithExpectEvidenceExitsOne) {
    const auto out = fresh_dir("negative");
    EXPECT_EQ(run_cli({"scenario", "--negative-control", "--expect-evidence", "--out", out.string()}), kExitNoEvidence);
    const auto md = slurp(out / "report.md");
    EXPECT_NE(md.find("no-evidence"), std::string::npos);
    EXPECT_NE(md.find("0.05"), std::string::npos);
    EXPECT_NE(md.find("0.65"), std::string::npos);
    EXPECT_NE(md.find("margin"), std::string::npos);
    EXPECT_EQ(run_cli({"scenario", "--negative-control", "--out", out.string()}), kExitOk);
    fs::remove_all(out);
}

TEST(Cli, StagedRunsOnFilesLeaveInputsUntouched) {
    const auto dir = fresh_dir("files");
    ScenarioSpec spec;
    spec.n_base = 300;
    const auto sc = build_scenario(spec);
    corpus::save_jsonl(dir / "pro.jsonl", sc.split.pro);
    corpus::save_jsonl(dir / "held.jsonl", sc.split.held);
    corpus::save_jsonl(dir / "train.jsonl", sc.training);
    {
        std::ofstream f(dir / "audit.json");
        f << R"({"corpus": {"pro": "pro.jsonl", "held": "held.jsonl"},
                 "backends": {"target": {"kind": "ngram-sim", "training": "train.jsonl"}}})";
    }
    const auto before = slurp(dir / "pro.jsonl") + slurp(dir / "held.jsonl");
    const auto cfg = (dir / "audit.json").string();
    EXPECT_EQ(run_cli({"ingest", "--pro", (dir / "pro.jsonl").string(), "--held", (dir / "held.jsonl").string()}), kExitOk);
    EXPECT_EQ(run_cli({"detect", "--config", cfg, "--out", (dir / "d").string()}), kExitOk);
    EXPECT_TRUE(fs::exists(dir / "d" / "metrics.csv"));
    EXPECT_EQ(run_cli({"stage1", "--config", cfg, "--no-cache", "--out", (dir / "s1").string()}), kExitOk);
    EXPECT_EQ(run_cli({"stage2", "--config", cfg, "--trace", (dir / "s1" / "trace.json").string(), "--out",
                       (dir / "s2").string()}),
              kExitOk);
    EXPECT_TRUE(fs::exists(dir / "s2" / "iterations.csv"));
    EXPECT_EQ(run_cli({"audit", "--config", cfg, "--detector", "zlib", "--out", (dir / "a").string()}), kExitOk);
    EXPECT_FALSE(fs::exists(dir / "a" / "ground_truth.json"));
    EXPECT_EQ(slurp(dir / "pro.jsonl") + slurp(dir / "held.jsonl"), before);
    fs::remove_all(dir);
}

#ifdef LAUDIT_CLI_PATH
TEST(Cli, BinaryReportsUsageErrors) {
    const std::string cmd = std::string(LAUDIT_CLI_PATH) + " bogus >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    ASSERT_TRUE(WIFEXITED(status));
    EXPECT_EQ(WEXITSTATUS(status), kExitError);
}
#endif
