#pragma once

#include "laudit/corpus.hpp"
#include "laudit/detectors.hpp"
#include "laudit/ngram.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace laudit::harness {

/// A synthetic laundering experiment.
struct ScenarioSpec {
    int true_register_id = 1;
    std::vector<std::string> detail_rules;  ///< scripted rule ids, e.g. "imagery"
    double laundering_fraction = 1.0;       ///< in (0, 1]
    /// Train the memorizer on laundered text disjoint from pro.
    bool negative_control = false;
    int order = 3;
    gateway::Smoothing smoothing;
    std::uint64_t seed = 1;
    std::size_t n_pro = 100;
    std::size_t n_held = 100;
    /// Unrelated verbatim documents always added to the memorizer's training
    /// set, standing in for pretraining data.
    std::size_t n_base = 4000;
    double visual_fraction = 0.5;

    void validate() const;
};

nlohmann::json to_json(const ScenarioSpec& s);
ScenarioSpec scenario_from_json(const nlohmann::json& j);

/// What the auditor must not see; kept for assertions.
struct GroundTruth {
    int register_id = 0;
    std::vector<std::string> detail_rules;
    std::string laundering_prompt;
    std::vector<std::string> laundered_member_ids;  ///< sorted
    std::vector<std::string> verbatim_member_ids;   ///< sorted
    std::vector<std::string> training_ids;          ///< every document the memorizer saw, sorted
    bool negative_control = false;
};

nlohmann::json to_json(const GroundTruth& g);

struct Scenario {
    corpus::CorpusSplit split;
    gateway::ModelHandle target;
    gateway::ModelHandle auxiliary;
    GroundTruth truth;
    std::vector<corpus::TextSample> training;  ///< texts as trained, laundered where applicable
    std::shared_ptr<const gateway::NgramMemorizer> model;

    /// Target, unigram reference and scripted auxiliary.
    detectors::Handles handles() const;
};

/// Synthetic documents for pro and held (plus a disjoint
/// block for the negative control).
std::vector<corpus::TextSample> default_scenario_corpus(const ScenarioSpec& spec);

/// Splits `corpus` by a seeded permutation, launders the chosen members and
/// trains the memorizer. Throws SizeError when the corpus is too small.
Scenario build_scenario(const ScenarioSpec& spec, std::span<const corpus::TextSample> corpus);

/// build_scenario() on default_scenario_corpus().
Scenario build_scenario(const ScenarioSpec& spec);

}  // namespace laudit::harness
