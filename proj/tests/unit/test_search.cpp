#include "laudit/errors.hpp"
#include "laudit/harness/scenario.hpp"
#include "laudit/harness/scripted_aux.hpp"
#include "laudit/registers.hpp"
#include "laudit/search.hpp"
#include "laudit/sim_backend.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace laudit;
using namespace laudit::reversal;

namespace {

const harness::Scenario& lyrical() {
    static const harness::Scenario sc = [] {
        harness::ScenarioSpec spec;
        spec.n_base = 1000;
        return harness::build_scenario(spec);
    }();
    return sc;
}

const harness::Scenario& imagery() {
    static const harness::Scenario sc = [] {
        harness::ScenarioSpec spec;
        spec.n_base = 1000;
        spec.detail_rules = {"imagery"};
        return harness::build_scenario(spec);
    }();
    return sc;
}

OpeningTemplate fixture_template(int id) {
    return OpeningTemplate{id, std::string(opening_template_fixture(id)), true};
}

}  // namespace

TEST(Registers, CatalogHas23UniqueEntries) {
    const auto& c = catalog();
    ASSERT_EQ(c.size(), 23u);
    std::set<std::string> abbr;
    for (std::size_t i = 0; i < c.size(); ++i) {
        EXPECT_EQ(c[i].id, static_cast<int>(i) + 1);
        abbr.insert(c[i].abbreviation);
        EXPECT_TRUE(has_placeholder(opening_template_fixture(c[i].id)));
        EXPECT_FALSE(standard_prompt_fixture(c[i].id).empty());
    }
    EXPECT_EQ(abbr.size(), 23u);
    EXPECT_EQ(c.front().abbreviation, "ly");
    EXPECT_EQ(c.back().abbreviation, "ed");
    EXPECT_THROW(register_by_id(0), ValidationError);
    EXPECT_THROW(register_by_id(24), ValidationError);
    ASSERT_NE(find_register("LYRICAL"), nullptr);
    EXPECT_EQ(find_register("en")->id, 2);
    EXPECT_EQ(find_register("nonsense"), nullptr);
}

TEST(Registers, PlaceholderNormalization) {
    EXPECT_EQ(normalize_placeholders("[Subject] is a [type/category]."), "[...] is a [...].");
    EXPECT_THROW(OpeningTemplate({1, "no placeholder", false}).validate(), ValidationError);
}

TEST(Search, StandardPromptRequestNamesTheRegister) {
    EXPECT_EQ(standard_prompt_request(register_by_id(1)),
              "Give me a prompt that can transfer text into register " + register_by_id(1).name + ".");
}

TEST(Search, ShortlistOrdersByConfThenId) {
    const std::map<int, double> conf = {{1, 0.2}, {2, 0.9}, {3, 0.9}, {4, 0.5}, {5, 0.1}};
    EXPECT_EQ(shortlist(conf, 3), (std::vector<int>{2, 3, 4}));
    EXPECT_EQ(shortlist(conf, 10).size(), 5u);
}

TEST(Search, ConfOfUniformMemorizerIsOneOverV) {
    const std::vector<std::string> vocab = {"alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta"};
    auto model = std::make_shared<const gateway::NgramMemorizer>(gateway::NgramMemorizer::uniform(vocab));
    const auto target = gateway::make_ngram_handle(model, "uniform");
    const auto aux = harness::make_scripted_aux();
    const double expected = 1.0 / static_cast<double>(model->vocabulary_size());
    SearchConfig cfg;
    for (const auto& r : catalog()) {
        const double c = register_confidence(target, aux, r, fixture_template(r.id), lyrical().split.pro, cfg);
        EXPECT_NEAR(c, expected, 1e-9) << r.abbreviation;
    }
}

TEST(Search, ConfOfOneHotTargetIsExactlyOne) {
    auto model = std::make_shared<const gateway::NgramMemorizer>(gateway::NgramMemorizer::one_hot("la"));
    const auto target = gateway::make_ngram_handle(model, "onehot");
    const auto aux = harness::make_scripted_aux();
    SearchConfig cfg;
    for (const auto& r : catalog()) {
        EXPECT_EQ(register_confidence(target, aux, r, fixture_template(r.id), lyrical().split.pro, cfg), 1.0)
            << r.abbreviation;
    }
}

TEST(Search, TrueRegisterHasHighestConf) {
    const auto& sc = lyrical();
    const auto h = sc.handles();
    SearchConfig cfg;
    const double own = register_confidence(h.target, *h.auxiliary, register_by_id(1), fixture_template(1), sc.split.pro, cfg);
    for (const auto& r : catalog()) {
        if (r.id == 1) continue;
        EXPECT_GT(own, register_confidence(h.target, *h.auxiliary, r, fixture_template(r.id), sc.split.pro, cfg))
            << r.abbreviation;
    }
}

TEST(Search, ExtractedTemplateMatchesFixture) {
    const auto& sc = lyrical();
    const auto h = sc.handles();
    SearchConfig cfg;
    const auto prompts = build_standard_prompts(*h.auxiliary, catalog());
    const auto t = build_opening_template(*h.auxiliary, register_by_id(1), prompts.at(1), sc.split.pro, cfg);
    EXPECT_FALSE(t.from_fixture);
    EXPECT_EQ(t.text, normalize_placeholders(opening_template_fixture(1)));
}

TEST(Search, ExactPromptSeparatesAndIdentityCollapses) {
    const auto& sc = lyrical();
    SearchConfig cfg;
    RewritePrompt exact;
    exact.text = sc.truth.laundering_prompt;
    EXPECT_GE(evaluate_prompt(sc.split, exact, sc.handles(), cfg).perf, 0.9);
    RewritePrompt identity;
    identity.text = "Repeat the text exactly as given.";
    double sum = 0.0;
    for (std::uint64_t seed : {2, 3, 4}) {
        harness::ScenarioSpec spec;
        spec.seed = seed;
        spec.n_base = 1000;
        const auto s = harness::build_scenario(spec);
        sum += evaluate_prompt(s.split, identity, s.handles(), cfg).perf;
    }
    EXPECT_NEAR(sum / 3.0, 0.5, 0.1);
}

TEST(Search, EvaluationIsRepeatable) {
    const auto& sc = lyrical();
    SearchConfig cfg;
    RewritePrompt p;
    p.text = std::string(standard_prompt_fixture(4));
    EXPECT_EQ(evaluate_prompt(sc.split, p, sc.handles(), cfg), evaluate_prompt(sc.split, p, sc.handles(), cfg));
}

TEST(Search, SingleCandidateIsSelected) {
    const auto& sc = lyrical();
    SearchConfig cfg;
    const auto prompts = build_standard_prompts(*sc.handles().auxiliary, catalog());
    const auto s = select_register({7}, prompts, sc.handles(), sc.split, cfg);
    EXPECT_EQ(s.register_id, 7);
    ASSERT_EQ(s.outcomes.size(), 1u);
    EXPECT_TRUE(s.outcomes[0].report);
}

TEST(Search, SelectionPicksTrueRegister) {
    const auto& sc = lyrical();
    SearchConfig cfg;
    const auto prompts = build_standard_prompts(*sc.handles().auxiliary, catalog());
    EXPECT_EQ(select_register({2, 1, 9}, prompts, sc.handles(), sc.split, cfg).register_id, 1);
    EXPECT_THROW(select_register({}, prompts, sc.handles(), sc.split, cfg), ValidationError);
}

TEST(Search, RefinementAcceptsOnlyStrictImprovements) {
    const auto& sc = imagery();
    SearchConfig cfg;
    RewritePrompt p0;
    p0.text = std::string(standard_prompt_fixture(1));
    p0.register_id = 1;
    const auto r = refine_loop(sc.split, p0, sc.handles(), cfg);
    const double start = evaluate_prompt(sc.split, p0, sc.handles(), cfg).perf;
    double incumbent = start;
    for (const auto& it : r.iterations) {
        EXPECT_EQ(it.incumbent_perf, incumbent);
        EXPECT_EQ(it.accepted, it.report.perf > incumbent);
        if (it.accepted) incumbent = it.report.perf;
    }
    EXPECT_EQ(r.report.perf, incumbent);
    EXPECT_GT(r.report.perf, start);
    EXPECT_NE(r.prompt.text.find("imagery adjective"), std::string::npos);
    EXPECT_EQ(r.prompt.register_id, 1);
    EXPECT_GE(r.prompt.generation, 1);
    // Patience: the run ends on `patience` consecutive rejections or on K.
    int trailing = 0;
    for (auto it = r.iterations.rbegin(); it != r.iterations.rend() && !it->accepted; ++it) ++trailing;
    EXPECT_TRUE(trailing == cfg.patience || static_cast<int>(r.iterations.size()) == cfg.K);
}

TEST(Search, ZeroBudgetKeepsStartingPrompt) {
    const auto& sc = imagery();
    SearchConfig cfg;
    cfg.K = 0;
    RewritePrompt p0;
    p0.text = std::string(standard_prompt_fixture(1));
    const auto r = refine_loop(sc.split, p0, sc.handles(), cfg);
    EXPECT_TRUE(r.iterations.empty());
    EXPECT_EQ(r.prompt, p0);
}

TEST(Search, VerdictRule) {
    EXPECT_EQ(decide_verdict(0.70, 0.95, 0.05, 0.65), Verdict::DirectMembership);
    EXPECT_EQ(decide_verdict(0.50, 0.90, 0.05, 0.65), Verdict::LaunderingEvidence);
    EXPECT_EQ(decide_verdict(0.50, 0.54, 0.05, 0.65), Verdict::NoEvidence);
    EXPECT_EQ(decide_verdict(0.50, 0.60, 0.05, 0.65), Verdict::NoEvidence);
    EXPECT_EQ(decide_verdict(0.62, 0.66, 0.05, 0.65), Verdict::NoEvidence);
    for (auto v : {Verdict::LaunderingEvidence, Verdict::DirectMembership, Verdict::NoEvidence}) {
        EXPECT_EQ(verdict_from_string(to_string(v)), v);
    }
}

TEST(Search, ConfigValidation) {
    const auto& sc = lyrical();
    SearchConfig cfg;
    EXPECT_NO_THROW(cfg.validate(sc.split));
    cfg.m = 101;
    EXPECT_THROW(cfg.validate(sc.split), SizeError);
    cfg = {};
    cfg.top_k = 0;
    EXPECT_THROW(cfg.validate(sc.split), ValidationError);
}

TEST(Search, AuditRecoversLyricalAndTraceRoundTrips) {
    const auto& sc = lyrical();
    SearchConfig cfg;
    const auto res = audit(sc.split, sc.handles(), cfg);
    EXPECT_EQ(res.verdict.verdict, Verdict::LaunderingEvidence);
    EXPECT_EQ(res.verdict.selected_register, 1);
    EXPECT_EQ(res.trace.confidences.size(), 23u);
    EXPECT_EQ(res.trace.shortlist.size(), cfg.top_k);
    EXPECT_DOUBLE_EQ(res.verdict.delta_margin, res.verdict.best_report.perf - (res.verdict.baseline_report.perf + cfg.delta));
    EXPECT_DOUBLE_EQ(res.verdict.theta_margin, res.verdict.best_report.perf - cfg.theta);
    EXPECT_EQ(res.verdict.final_by_detector.size(), detectors::all_detector_ids().size());

    const auto j = to_json(res.trace);
    EXPECT_EQ(to_json(trace_from_json(j)).dump(), j.dump());
    const auto vj = to_json(res.verdict);
    EXPECT_EQ(to_json(verdict_json_to_struct(vj)).dump(), vj.dump());
    EXPECT_GT(res.trace.requests.at("auxiliary").at("rewrite"), 0u);
}

TEST(Search, DirectMembershipSkipsSearch) {
    harness::ScenarioSpec spec;
    spec.n_base = 200;
    spec.laundering_fraction = 0.05;
    const auto sc = harness::build_scenario(spec);
    SearchConfig cfg;
    const auto res = audit(sc.split, sc.handles(), cfg);
    ASSERT_EQ(res.verdict.verdict, Verdict::DirectMembership);
    EXPECT_TRUE(res.trace.confidences.empty());
    EXPECT_TRUE(res.trace.iterations.empty());
}
