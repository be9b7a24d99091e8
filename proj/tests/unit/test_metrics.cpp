#include "laudit/errors.hpp"
#include "laudit/metrics.hpp"
#include "laudit/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace laudit;
using namespace laudit::metrics;

namespace {

double brute_auc(const std::vector<double>& a, const std::vector<double>& b) {
    double wins = 0.0;
    for (double x : a) {
        for (double y : b) wins += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
    }
    return wins / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

double brute_asr(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> taus = {std::numeric_limits<double>::infinity()};
    taus.insert(taus.end(), a.begin(), a.end());
    taus.insert(taus.end(), b.begin(), b.end());
    double best = 0.0;
    for (double t : taus) {
        std::size_t tp = 0, tn = 0;
        for (double x : a) tp += x >= t;
        for (double y : b) tn += y < t;
        best = std::max(best, 0.5 * (static_cast<double>(tp) / static_cast<double>(a.size()) +
                                     static_cast<double>(tn) / static_cast<double>(b.size())));
    }
    return best;
}

/// Scores on a coarse grid so that ties are frequent.
std::vector<double> draw(StableRng& rng, std::size_t n, double shift) {
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(std::floor((rng.uniform() + shift) * 8.0) / 4.0);
    return out;
}

ScoreVector vec(std::vector<double> m, std::vector<double> n) {
    ScoreVector v;
    v.detector_id = "loss";
    v.member_scores = std::move(m);
    v.nonmember_scores = std::move(n);
    return v;
}

}  // namespace

TEST(Metrics, AucWorkedExamples) {
    EXPECT_DOUBLE_EQ(auc(std::vector<double>{3, 4}, std::vector<double>{1, 2}), 1.0);
    EXPECT_DOUBLE_EQ(auc(std::vector<double>{1, 2}, std::vector<double>{3, 4}), 0.0);
    EXPECT_DOUBLE_EQ(auc(std::vector<double>{1, 1}, std::vector<double>{1, 1}), 0.5);
    // Pairs: (2>1) win, (2=2) half, (3>1) win, (3>2) win -> 3.5 / 4.
    EXPECT_DOUBLE_EQ(auc(std::vector<double>{2, 3}, std::vector<double>{1, 2}), 0.875);
}

TEST(Metrics, AucMatchesBruteForceWithTies) {
    StableRng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto a = draw(rng, 1 + rng.below(50), 0.1);
        const auto b = draw(rng, 1 + rng.below(50), 0.0);
        ASSERT_NEAR(auc(a, b), brute_auc(a, b), 1e-12) << "trial " << trial;
    }
}

TEST(Metrics, AsrMatchesExhaustiveSweep) {
    StableRng rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto a = draw(rng, 1 + rng.below(50), 0.2);
        const auto b = draw(rng, 1 + rng.below(50), 0.0);
        ASSERT_EQ(asr(a, b), brute_asr(a, b)) << "trial " << trial;
    }
}

TEST(Metrics, AsrWorkedExamples) {
    EXPECT_DOUBLE_EQ(asr(std::vector<double>{3, 4}, std::vector<double>{1, 2}), 1.0);
    // Fully inverted scores: the best rule is a constant guess.
    EXPECT_DOUBLE_EQ(asr(std::vector<double>{1}, std::vector<double>{2}), 0.5);
}

TEST(Metrics, TprAtFprIsMonotoneInLevel) {
    StableRng rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const auto a = draw(rng, 1 + rng.below(50), 0.15);
        const auto b = draw(rng, 1 + rng.below(50), 0.0);
        double prev = -1.0;
        for (double level = 0.01; level < 1.0; level += 0.01) {
            const double t = tpr_at_fpr(a, b, level);
            ASSERT_GE(t, prev);
            ASSERT_GE(t, 0.0);
            ASSERT_LE(t, 1.0);
            prev = t;
        }
    }
}

TEST(Metrics, TprAtFprWorkedExample) {
    const std::vector<double> m = {5, 4, 3, 0};
    const std::vector<double> n = {3.5, 1, 0.5, 0.2};
    // tau = 4: fpr 0, tpr 0.5; tau = 3.5: fpr 0.25.
    EXPECT_DOUBLE_EQ(tpr_at_fpr(m, n, 0.1), 0.5);
    EXPECT_DOUBLE_EQ(tpr_at_fpr(m, n, 0.25), 0.75);
    EXPECT_THROW(tpr_at_fpr(m, n, 0.0), ValidationError);
    EXPECT_THROW(tpr_at_fpr(m, n, 1.0), ValidationError);
}

TEST(Metrics, InvariantUnderIncreasingAffineMap) {
    StableRng rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = draw(rng, 1 + rng.below(30), 0.1);
        const auto b = draw(rng, 1 + rng.below(30), 0.0);
        auto a2 = a, b2 = b;
        for (auto& x : a2) x = 2 * x + 1;
        for (auto& x : b2) x = 2 * x + 1;
        EXPECT_EQ(auc(a, b), auc(a2, b2));
        EXPECT_EQ(asr(a, b), asr(a2, b2));
        EXPECT_EQ(tpr_at_fpr(a, b, 0.05), tpr_at_fpr(a2, b2, 0.05));
    }
}

TEST(Metrics, RejectsEmptyAndNonFinite) {
    EXPECT_THROW(auc(std::vector<double>{}, std::vector<double>{1}), Error);
    EXPECT_THROW(vec({1, std::nan("")}, {1}).validate(), ValidationError);
    EXPECT_THROW(make_report(vec({1}, {})), Error);
}

TEST(Metrics, PerfObjectives) {
    const auto v = vec({2, 3}, {1, 2});
    EXPECT_DOUBLE_EQ(perf(v), 0.875);
    PerfConfig asr_cfg{Objective::Asr, 0.5};
    EXPECT_DOUBLE_EQ(perf(v, asr_cfg), asr(v));
    PerfConfig blend{Objective::Blend, 0.25};
    EXPECT_DOUBLE_EQ(perf(v, blend), 0.25 * auc(v) + 0.75 * asr(v));
    EXPECT_EQ(objective_from_string("blend"), Objective::Blend);
    EXPECT_THROW(objective_from_string("f1"), ValidationError);
}

TEST(Metrics, ReportJsonRoundTrip) {
    const auto r = make_report(vec({2, 3, 5}, {1, 2, 2.5}));
    EXPECT_EQ(report_from_json(to_json(r)), r);
    EXPECT_EQ(r.n_member, 3u);
    EXPECT_EQ(r.tpr_at.size(), kDefaultFprLevels.size());
}

TEST(Metrics, CsvRowMatchesReport) {
    const auto r = make_report(vec({2, 3}, {1, 2}));
    const auto row = csv_row("original", r);
    EXPECT_EQ(row.substr(0, 23), "original,loss,0.8750,0.");
    const auto header = csv_header();
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), std::count(header.begin(), header.end(), ','));
}

TEST(Scores, JsonRoundTripKeepsFields) {
    auto v = vec({1.5, 2}, {0.5});
    v.transform_hash = "abc";
    v.model_id = "m";
    const auto j = detectors::to_json(v);
    for (const char* key : {"detector_id", "member_scores", "nonmember_scores", "transform_hash", "model_id"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(detectors::score_vector_from_json(j), v);
}
