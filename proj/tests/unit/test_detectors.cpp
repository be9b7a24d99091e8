#include "laudit/detectors.hpp"
#include "laudit/errors.hpp"
#include "laudit/harness/scenario.hpp"
#include "laudit/harness/scripted_aux.hpp"
#include "laudit/harness/synthetic.hpp"
#include "laudit/http_backend.hpp"
#include "laudit/metrics.hpp"
#include "laudit/sim_backend.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace laudit;
using namespace laudit::detectors;

namespace {

/// Memorizer trained on the pro half of a small synthetic split.
struct Fixture {
    CorpusSplit split;
    Handles handles{gateway::make_ngram_handle(std::make_shared<const gateway::NgramMemorizer>(
                                                   gateway::NgramMemorizer::one_hot("x")),
                                               "placeholder")};

    Fixture() {
        harness::SyntheticOptions o;
        o.count = 200;
        o.seed = 11;
        auto docs = harness::generate_corpus(o);
        split.pro.assign(docs.begin(), docs.begin() + 100);
        split.held.assign(docs.begin() + 100, docs.end());
        auto model = std::make_shared<const gateway::NgramMemorizer>(gateway::NgramMemorizer::train(split.pro, 3));
        handles.target = gateway::make_ngram_handle(model, "mem");
        handles.reference = make_reference_handle();
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

}  // namespace

TEST(Detectors, MinKMeanSelectsSmallest) {
    const std::vector<double> v = {-1, -5, -3, -2};
    EXPECT_DOUBLE_EQ(min_k_mean(v, 50), -4.0);
    EXPECT_DOUBLE_EQ(min_k_mean(v, 20), -5.0);
    EXPECT_DOUBLE_EQ(min_k_mean(v, 100), mean_logprob(v));
    EXPECT_THROW(min_k_mean(v, 0), ValidationError);
    EXPECT_THROW(min_k_mean(v, 101), ValidationError);
}

TEST(Detectors, MinKppZOracle) {
    // Next-token distribution (0.7, 0.2, 0.1); z of each outcome.
    const std::vector<double> p = {0.7, 0.2, 0.1};
    double mu = 0.0, sq = 0.0;
    for (double q : p) {
        mu += q * std::log(q);
        sq += q * std::log(q) * std::log(q);
    }
    const double sigma = std::sqrt(sq - mu * mu);
    std::vector<gateway::TokenStats> stats;
    for (double q : p) stats.push_back({"t", std::log(q), mu, sigma});
    stats.push_back({"flat", std::log(0.5), std::log(0.5), 0.0});
    const auto z = minkpp_z(stats);
    EXPECT_NEAR(z[0], 0.6330918235273413, 1e-12);
    EXPECT_NEAR(z[1], -1.1486118263541842, 1e-12);
    EXPECT_NEAR(z[2], -2.134419111983022, 1e-12);
    EXPECT_EQ(z[3], 0.0);
}

TEST(Detectors, ZlibLengthOracle) {
    std::string text;
    for (int i = 0; i < 100; ++i) text += "a ";
    text.pop_back();
    // Frozen from an independent zlib.compress(level=6).
    EXPECT_EQ(zlib_compressed_size(text), 13u);
}

TEST(Detectors, MinKAtFullEqualsLoss) {
    const auto& f = fixture();
    for (const auto* side : {&f.split.pro, &f.split.held}) {
        for (std::size_t i = 0; i < 50; ++i) {
            const auto& t = (*side)[i].text;
            EXPECT_EQ(mink_score(f.handles.target, t, 100.0), loss_score(f.handles.target, t));
        }
    }
}

TEST(Detectors, RefAgainstItselfIsZero) {
    const auto& f = fixture();
    for (std::size_t i = 0; i < 100; ++i) {
        EXPECT_EQ(ref_score(f.handles.target, f.handles.target, f.split.pro[i].text), 0.0);
    }
}

TEST(Detectors, VerbatimMembersScoreHigherOnEveryDetector) {
    const auto& f = fixture();
    for (const auto& id : all_detector_ids()) {
        DetectorConfig cfg;
        cfg.id = id;
        const auto v = run_detector(cfg, f.handles, f.split);
        EXPECT_EQ(v.member_scores.size(), 100u);
        EXPECT_GT(metrics::auc(v), 0.75) << id;
    }
}

TEST(Detectors, RecallDirectionOnLaunderedHarness) {
    harness::ScenarioSpec spec;
    spec.n_base = 500;
    const auto sc = harness::build_scenario(spec);
    DetectorConfig cfg;
    cfg.id = "recall";
    RewritePrompt p;
    p.text = sc.truth.laundering_prompt;
    const auto v = run_detector(cfg, sc.handles(), sc.split, p);
    double mm = 0.0, mn = 0.0;
    for (double x : v.member_scores) mm += x;
    for (double x : v.nonmember_scores) mn += x;
    EXPECT_GT(mm / 100.0, mn / 100.0);
    EXPECT_EQ(kRecallSign, 1.0);
}

TEST(Detectors, RecallPrefixJoinsShotsWithBlankLines) {
    const std::vector<TextSample> shots = {corpus::make_sample("a", "One."), corpus::make_sample("b", "Two.")};
    EXPECT_EQ(recall_prefix(shots), "One.\n\nTwo.\n\n");
    EXPECT_THROW(recall_prefix({}), ValidationError);
}

TEST(Detectors, RecallShotsComeFromHeld) {
    const auto& f = fixture();
    DetectorConfig cfg;
    cfg.id = "recall";
    cfg.seed = 4;
    const Detector d(cfg, f.handles, f.split);
    ASSERT_EQ(d.shots().size(), 5u);
    for (const auto& s : d.shots()) {
        EXPECT_NE(std::find(f.split.held.begin(), f.split.held.end(), s), f.split.held.end());
    }
}

TEST(Detectors, MinKppUnavailableOverHttp) {
    gateway::HttpSettings s;
    s.base_url = "http://127.0.0.1:9";
    s.model = "m";
    Handles h{gateway::make_http_target(s)};
    DetectorConfig cfg;
    cfg.id = "minkpp";
    EXPECT_THROW(Detector(cfg, h, fixture().split), UnsupportedDetectorError);
    EXPECT_THROW(minkpp_score(h.target, "text"), UnsupportedDetectorError);
}

TEST(Detectors, ConfigurationErrors) {
    const auto& f = fixture();
    DetectorConfig cfg;
    cfg.id = "nope";
    EXPECT_THROW(Detector(cfg, f.handles, f.split), ValidationError);
    cfg.id = "ref";
    Handles no_ref{f.handles.target};
    EXPECT_THROW(Detector(cfg, no_ref, f.split), ValidationError);
    cfg.id = "recall";
    cfg.recall_shots = 101;
    EXPECT_THROW(Detector(cfg, f.handles, f.split), SizeError);
}

TEST(Detectors, TransformNeedsAuxiliaryAndRecordsHash) {
    const auto& f = fixture();
    RewritePrompt p;
    p.text = "Rewrite the text in a lyrical style.";
    EXPECT_THROW(run_detector({}, f.handles, f.split, p), ValidationError);
    auto h = f.handles;
    h.auxiliary = harness::make_scripted_aux();
    const auto v = run_detector({}, h, f.split, p);
    EXPECT_EQ(v.transform_hash, p.hash());
    EXPECT_EQ(v.model_id, "mem");
}

TEST(Detectors, ScoresAreDeterministic) {
    const auto& f = fixture();
    DetectorConfig cfg;
    cfg.id = "minkpp";
    EXPECT_EQ(run_detector(cfg, f.handles, f.split), run_detector(cfg, f.handles, f.split));
}
