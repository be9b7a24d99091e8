// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include "laudit/detectors.hpp"
#include "laudit/harness/report.hpp"
#include "laudit/harness/scenario.hpp"
#include "laudit/harness/scripted_aux.hpp"
#include "laudit/metrics.hpp"
#include "laudit/registers.hpp"
#include "laudit/search.hpp"
#include "laudit/sim_backend.hpp"

#include <algorithm>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace laudit;
using laudit::harness::Scenario;
using laudit::harness::ScenarioSpec;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void run(const char* id, const std::function<Outcome()>& body) {
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

// Brute-force oracles, independent of the library.
double pair_auc(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (double x : a)
        for (double y : b) s += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
    return s / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

double sweep_asr(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> th(a);
    th.insert(th.end(), b.begin(), b.end());
    th.push_back(std::numeric_limits<double>::infinity());
    double best = 0.0;
    for (double t : th) {
        double tp = 0, tn = 0;
        for (double x : a) tp += x >= t;
        for (double y : b) tn += y < t;
        best = std::max(best, 0.5 * (tp / a.size() + tn / b.size()));
    }
    return best;
}

Outcome ac1() {
    const auto t0 = Clock::now();
    const auto sc = harness::build_scenario(ScenarioSpec{});
    const auto h = sc.handles();
    RewritePrompt oracle;
    oracle.text = sc.truth.laundering_prompt;
    const auto surrogate = detectors::synthesize(*h.auxiliary, sc.split, oracle);
    bool ok = true;
    std::string d;
    for (const auto& id : detectors::all_detector_ids()) {
        detectors::DetectorConfig cfg;
        cfg.id = id;
        const detectors::Detector det(cfg, h, sc.split);
        const double orig = metrics::auc(detectors::score_split(det, h, sc.split));
        const double rev = metrics::auc(detectors::score_split(det, h, surrogate));
        ok = ok && orig <= 0.60 && rev >= 0.90;
        d += id + " " + fmt(orig) + "->" + fmt(rev) + "; ";
    }
    const double secs = seconds_since(t0);
    ok = ok && secs <= 60.0;
    return {ok, d + "time " + fmt(secs) + "s"};
}

Outcome ac2() {
    const auto t0 = Clock::now();
    int selected = 0, top_conf = 0;
    std::string d;
    for (int reg : {1, 2, 3, 4, 5}) {
        ScenarioSpec spec;
        spec.true_register_id = reg;
        const auto sc = harness::build_scenario(spec);
        reversal::SearchConfig cfg;
        const auto s1 = reversal::identify_register(sc.split, sc.handles(), cfg);
        const bool sel = s1.selection.register_id == reg;
        double own = -1.0, best = -1.0;
        for (const auto& c : s1.confidences) {
            if (!c.conf) continue;
            if (c.register_id == reg) own = *c.conf;
            best = std::max(best, *c.conf);
        }
        const bool top = own >= 0.0 && own == best;
        selected += sel;
        top_conf += top;
        d += reversal::register_by_id(reg).abbreviation + ":" + reversal::register_by_id(s1.selection.register_id).abbreviation +
             (top ? "/top " : "/not-top ");
    }
    const double secs = seconds_since(t0);
    return {selected >= 4 && top_conf >= 4 && secs <= 180.0,
            d + "selected " + std::to_string(selected) + "/5, top conf " + std::to_string(top_conf) + "/5, time " +
                fmt(secs) + "s"};
}

const reversal::AuditResult& detail_audit() {
    static const reversal::AuditResult r = [] {
        ScenarioSpec spec;
        spec.detail_rules = {"imagery"};
        const auto sc = harness::build_scenario(spec);
        return reversal::audit(sc.split, sc.handles(), reversal::SearchConfig{});
    }();
    return r;
}

Outcome ac3() {
    const auto& t = detail_audit().trace;
    if (!t.stage1_report || !t.final_report) return {false, "no stage-2 run"};
    const double s1 = t.stage1_report->perf;
    const double fin = t.final_report->perf;
    std::vector<double> accepted = {s1};
    for (const auto& it : t.iterations)
        if (it.accepted) accepted.push_back(it.report.perf);
    bool increasing = true;
    for (std::size_t i = 1; i < accepted.size(); ++i) increasing = increasing && accepted[i] > accepted[i - 1];
    return {fin >= s1 + 0.03 && increasing,
            "stage1 " + fmt(s1) + ", final " + fmt(fin) + ", accepted " + std::to_string(accepted.size() - 1) +
                (increasing ? ", strictly increasing" : ", NOT increasing")};
}

Outcome ac4() {
    bool ok = true;
    double lo = 1.0, hi = 0.0;
    int no_evidence = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        ScenarioSpec spec;
        spec.negative_control = true;
        spec.seed = seed;
        const auto sc = harness::build_scenario(spec);
        reversal::SearchConfig cfg;
        cfg.seed = seed;
        cfg.detector.seed = seed;
        const auto r = reversal::audit(sc.split, sc.handles(), cfg);
        no_evidence += r.verdict.verdict == reversal::Verdict::NoEvidence;
        ok = ok && r.verdict.verdict == reversal::Verdict::NoEvidence;
        for (const auto& [id, rep] : r.verdict.final_by_detector) {
            lo = std::min(lo, rep.auc);
            hi = std::max(hi, rep.auc);
        }
        ok = ok && !r.verdict.final_by_detector.empty();
    }
    ok = ok && lo >= 0.40 && hi <= 0.60;
    return {ok, "no-evidence " + std::to_string(no_evidence) + "/10, final AUC range [" + fmt(lo) + ", " + fmt(hi) + "]"};
}

Outcome ac5() {
    ScenarioSpec spec;
    spec.laundering_fraction = 0.5;
    const auto sc = harness::build_scenario(spec);
    const auto r = reversal::audit(sc.split, sc.handles(), reversal::SearchConfig{});
    const double base = r.verdict.baseline_report.auc;
    const double fin = r.verdict.best_report.auc;
    return {r.verdict.verdict == reversal::Verdict::LaunderingEvidence && fin >= base + 0.05,
            reversal::to_string(r.verdict.verdict) + ", baseline AUC " + fmt(base) + ", final AUC " + fmt(fin)};
}

Outcome ac6() {
    std::mt19937_64 rng(20261016);
    double worst = 0.0;
    int asr_mismatch = 0, non_monotone = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 50, m = 1 + rng() % 50;
        const int grid = 1 + static_cast<int>(rng() % 12);  // coarse grids force ties
        std::uniform_real_distribution<double> u(0.0, 1.0);
        auto draw = [&](double shift) {
            double x = u(rng) + shift;
            return trial % 2 == 0 ? std::round(x * grid) / grid : x;
        };
        std::vector<double> a(n), b(m);
        for (auto& x : a) x = draw(0.2);
        for (auto& y : b) y = draw(0.0);
        worst = std::max(worst, std::abs(metrics::auc(a, b) - pair_auc(a, b)));
        asr_mismatch += metrics::asr(a, b) != sweep_asr(a, b);
        double prev = -1.0;
        for (int k = 1; k < 100; ++k) {
            const double t = metrics::tpr_at_fpr(a, b, k / 100.0);
            non_monotone += t < prev;
            prev = t;
        }
    }
    return {worst <= 1e-12 && asr_mismatch == 0 && non_monotone == 0,
            "max |auc - brute| " + std::to_string(worst) + ", asr mismatches " + std::to_string(asr_mismatch) +
                ", tpr monotonicity violations " + std::to_string(non_monotone)};
}

Outcome ac7() {
    ScenarioSpec spec;
    spec.n_base = 500;
    const auto sc = harness::build_scenario(spec);
    std::vector<corpus::TextSample> samples(sc.split.pro.begin(), sc.split.pro.begin() + 50);
    samples.insert(samples.end(), sc.split.held.begin(), sc.split.held.begin() + 50);
    int mink_diff = 0, ref_nonzero = 0;
    for (const auto& s : samples) {
        mink_diff += detectors::mink_score(sc.target, s.text, 100.0) != detectors::loss_score(sc.target, s.text);
        ref_nonzero += detectors::ref_score(sc.target, sc.target, s.text) != 0.0;
    }
    int variant = 0;
    const auto h = sc.handles();
    for (const auto& id : detectors::all_detector_ids()) {
        detectors::DetectorConfig cfg;
        cfg.id = id;
        auto v = detectors::run_detector(cfg, h, sc.split);
        auto w = v;
        for (auto& x : w.member_scores) x = 2 * x + 1;
        for (auto& x : w.nonmember_scores) x = 2 * x + 1;
        variant += metrics::auc(v) != metrics::auc(w) || metrics::asr(v) != metrics::asr(w);
        for (double level : {0.01, 0.05, 0.1}) variant += metrics::tpr_at_fpr(v, level) != metrics::tpr_at_fpr(w, level);
    }
    return {mink_diff == 0 && ref_nonzero == 0 && variant == 0,
            "mink100!=loss " + std::to_string(mink_diff) + "/100, ref(self)!=0 " + std::to_string(ref_nonzero) +
                "/100, affine-variant metrics " + std::to_string(variant)};
}

Outcome ac8() {
    ScenarioSpec spec;
    spec.n_base = 100;
    const auto sc = harness::build_scenario(spec);
    const std::vector<std::string> vocab = {"north", "south", "east", "west", "up", "down", "left", "right"};
    auto uniform = std::make_shared<const gateway::NgramMemorizer>(gateway::NgramMemorizer::uniform(vocab));
    auto one_hot = std::make_shared<const gateway::NgramMemorizer>(gateway::NgramMemorizer::one_hot("la"));
    const auto tu = gateway::make_ngram_handle(uniform, "uniform");
    const auto to = gateway::make_ngram_handle(one_hot, "one-hot");
    const double expected = 1.0 / static_cast<double>(uniform->vocabulary_size());
    const auto aux = harness::make_scripted_aux();
    reversal::SearchConfig cfg;
    double worst = 0.0;
    int not_one = 0;
    for (const auto& r : reversal::catalog()) {
        const reversal::OpeningTemplate tmpl{r.id, std::string(reversal::opening_template_fixture(r.id)), true};
        worst = std::max(worst, std::abs(reversal::register_confidence(tu, aux, r, tmpl, sc.split.pro, cfg) - expected));
        not_one += reversal::register_confidence(to, aux, r, tmpl, sc.split.pro, cfg) != 1.0;
    }
    return {worst <= 1e-9 && not_one == 0,
            "uniform max |Conf - 1/|V|| " + std::to_string(worst) + ", one-hot Conf != 1 in " + std::to_string(not_one) +
                "/23"};
}

Outcome ac9() {
    auto once = [] {
        const auto sc = harness::build_scenario(ScenarioSpec{});
        return harness::dump_json(reversal::to_json(reversal::audit(sc.split, sc.handles(), reversal::SearchConfig{}).trace));
    };
    const auto a = once();
    const auto b = once();
    return {a == b, std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "differ")};
}

Outcome ac10() {
    const auto& r = detail_audit();
    const auto& t = r.trace;
    if (!t.stage1_report || !t.final_report) return {false, "no stage-2 run"};
    const double base = r.verdict.baseline_report.perf, s1 = t.stage1_report->perf, full = t.final_report->perf;
    return {full >= s1 + 0.02 && s1 >= base + 0.02,
            "baseline " + fmt(base) + ", stage1 " + fmt(s1) + ", full " + fmt(full)};
}

}  // namespace

int main() {
    run("AC1", ac1);
    run("AC2", ac2);
    run("AC3", ac3);
    run("AC4", ac4);
    run("AC5", ac5);
    run("AC6", ac6);
    run("AC7", ac7);
    run("AC8", ac8);
    run("AC9", ac9);
    run("AC10", ac10);
    std::printf("%s: %d failing\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
