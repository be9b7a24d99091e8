#include "laudit/harness/scenario.hpp"

#include "laudit/cache.hpp"
#include "laudit/errors.hpp"
#include "laudit/harness/scripted_aux.hpp"
#include "laudit/harness/synthetic.hpp"
#include "laudit/registers.hpp"
#include "laudit/rng.hpp"
#include "laudit/sim_backend.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

namespace laudit::harness {

namespace {

constexpr std::uint64_t kSplitStream = 0x5c3a71;
constexpr std::uint64_t kLaunderStream = 0x1a0d3e;
constexpr std::uint64_t kBaseStream = 0xba5e;

std::vector<std::string> sorted_ids(const std::vector<corpus::TextSample>& s) {
    std::vector<std::string> out;
    for (const auto& x : s) out.push_back(x.id);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<corpus::TextSample> base_corpus(const ScenarioSpec& spec, std::span<const corpus::TextSample> exclude) {
    if (spec.n_base == 0) return {};
    std::unordered_set<std::string> taken;
    for (const auto& s : exclude) taken.insert(s.text);
    SyntheticOptions opts;
    opts.count = spec.n_base + exclude.size();
    opts.seed = mix64(spec.seed, kBaseStream);
    opts.id_prefix = "base";
    opts.source_tag = "base";
    opts.visual_fraction = spec.visual_fraction;
    std::vector<corpus::TextSample> out;
    for (auto& s : generate_corpus(opts)) {
        if (out.size() == spec.n_base) break;
        if (!taken.count(s.text)) out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

void ScenarioSpec::validate() const {
    reversal::register_by_id(true_register_id);
    for (const auto& r : detail_rules) detail_rule(r);
    if (!(laundering_fraction > 0.0 && laundering_fraction <= 1.0)) {
        throw ValidationError("laundering_fraction must lie in (0, 1]");
    }
    if (order < 1) throw ValidationError("memorizer order must be at least 1");
    if (n_pro == 0 || n_held == 0) throw ValidationError("n_pro and n_held must be positive");
    if (visual_fraction < 0.0 || visual_fraction > 1.0) throw ValidationError("visual_fraction must lie in [0, 1]");
}

nlohmann::json to_json(const ScenarioSpec& s) {
    return {{"true_register", reversal::register_by_id(s.true_register_id).abbreviation},
            {"detail_rules", s.detail_rules},
            {"laundering_fraction", s.laundering_fraction},
            {"negative_control", s.negative_control},
            {"order", s.order},
            {"alpha", s.smoothing.alpha},
            {"weights", s.smoothing.weights},
            {"seed", s.seed},
            {"n_pro", s.n_pro},
            {"n_held", s.n_held},
            {"n_base", s.n_base},
            {"visual_fraction", s.visual_fraction}};
}

ScenarioSpec scenario_from_json(const nlohmann::json& j) {
    ScenarioSpec s;
    try {
        if (j.contains("true_register")) {
            const auto& r = j.at("true_register");
            if (r.is_number_integer()) {
                s.true_register_id = r.get<int>();
            } else {
                const auto* reg = reversal::find_register(r.get<std::string>());
                if (reg == nullptr) throw ValidationError("unknown register '" + r.get<std::string>() + "'");
                s.true_register_id = reg->id;
            }
        }
        if (j.contains("detail_rules")) s.detail_rules = j.at("detail_rules").get<std::vector<std::string>>();
        s.laundering_fraction = j.value("laundering_fraction", s.laundering_fraction);
        s.negative_control = j.value("negative_control", s.negative_control);
        s.order = j.value("order", s.order);
        s.smoothing.alpha = j.value("alpha", s.smoothing.alpha);
        if (j.contains("weights")) s.smoothing.weights = j.at("weights").get<std::vector<double>>();
        s.seed = j.value("seed", s.seed);
        s.n_pro = j.value("n_pro", s.n_pro);
        s.n_held = j.value("n_held", s.n_held);
        s.n_base = j.value("n_base", s.n_base);
        s.visual_fraction = j.value("visual_fraction", s.visual_fraction);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
    s.validate();
    return s;
}

nlohmann::json to_json(const GroundTruth& g) {
    return {{"register", reversal::register_by_id(g.register_id).abbreviation},
            {"register_id", g.register_id},
            {"detail_rules", g.detail_rules},
            {"laundering_prompt", g.laundering_prompt},
            {"laundered_member_ids", g.laundered_member_ids},
            {"verbatim_member_ids", g.verbatim_member_ids},
            {"training_ids", g.training_ids},
            {"negative_control", g.negative_control}};
}

detectors::Handles Scenario::handles() const {
    return detectors::Handles{target, detectors::make_reference_handle(), auxiliary};
}

std::vector<corpus::TextSample> default_scenario_corpus(const ScenarioSpec& spec) {
    SyntheticOptions opts;
    opts.count = spec.n_pro + spec.n_held + (spec.negative_control ? spec.n_pro : 0);
    opts.seed = spec.seed;
    opts.visual_fraction = spec.visual_fraction;
    return generate_corpus(opts);
}

Scenario build_scenario(const ScenarioSpec& spec, std::span<const corpus::TextSample> corpus) {
    spec.validate();
    const std::size_t need = spec.n_pro + spec.n_held + (spec.negative_control ? spec.n_pro : 0);
    if (corpus.size() < need) {
        throw SizeError("scenario needs " + std::to_string(need) + " documents, corpus has " +
                        std::to_string(corpus.size()));
    }
    const auto order = corpus::uniform_sample_indices(corpus.size(), need, mix64(spec.seed, kSplitStream));
    Scenario sc{.split = {},
                .target = make_scripted_aux(),  // replaced below
                .auxiliary = make_scripted_aux(),
                .truth = {},
                .training = {},
                .model = nullptr};
    std::size_t pos = 0;
    for (; pos < spec.n_pro; ++pos) sc.split.pro.push_back(corpus[order[pos]]);
    for (; pos < spec.n_pro + spec.n_held; ++pos) sc.split.held.push_back(corpus[order[pos]]);
    std::vector<corpus::TextSample> disjoint;
    for (; pos < need; ++pos) disjoint.push_back(corpus[order[pos]]);
    sc.split.validate();

    const auto& members = spec.negative_control ? disjoint : sc.split.pro;
    const auto count = static_cast<std::size_t>(std::llround(spec.laundering_fraction * static_cast<double>(members.size())));
    const auto chosen = corpus::uniform_sample_indices(members.size(), std::max<std::size_t>(count, 1),
                                                       mix64(spec.seed, kLaunderStream));
    std::vector<bool> laundered(members.size(), false);
    for (auto i : chosen) laundered[i] = true;

    std::vector<corpus::TextSample> exclude(corpus.begin(), corpus.end());
    auto base = base_corpus(spec, exclude);
    sc.training = base;
    std::vector<corpus::TextSample> laundered_docs, verbatim_docs;
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (laundered[i]) {
            auto doc = members[i];
            doc.text = launder(spec.true_register_id, spec.detail_rules, doc.text);
            sc.training.push_back(doc);
            laundered_docs.push_back(members[i]);
        } else {
            sc.training.push_back(members[i]);
            verbatim_docs.push_back(members[i]);
        }
    }

    auto model = std::make_shared<const gateway::NgramMemorizer>(
        gateway::NgramMemorizer::train(sc.training, spec.order, spec.smoothing));
    sc.model = model;
    sc.target = gateway::make_ngram_handle(model, "ngram-sim");
    sc.target.set_cache(std::make_shared<gateway::MemoryCache>());
    sc.auxiliary.set_cache(std::make_shared<gateway::MemoryCache>());

    sc.truth.register_id = spec.true_register_id;
    sc.truth.detail_rules = spec.detail_rules;
    sc.truth.laundering_prompt = laundering_prompt(spec.true_register_id, spec.detail_rules);
    sc.truth.negative_control = spec.negative_control;
    if (!spec.negative_control) {
        sc.truth.laundered_member_ids = sorted_ids(laundered_docs);
        sc.truth.verbatim_member_ids = sorted_ids(verbatim_docs);
    }
    sc.truth.training_ids = sorted_ids(sc.training);
    return sc;
}

Scenario build_scenario(const ScenarioSpec& spec) {
    const auto corpus = default_scenario_corpus(spec);
    return build_scenario(spec, corpus);
}

}  // namespace laudit::harness
