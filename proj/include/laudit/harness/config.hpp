#pragma once

#include "laudit/harness/scenario.hpp"
#include "laudit/search.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace laudit::harness {

/// One model endpoint as written in the "backends" section.
struct BackendConfig {
    /// Target: "ngram-sim" or "http". Auxiliary: "scripted-aux" or "http".
    /// Reference: "unigram" or "none".
    std::string kind;
    std::string base_url;
    std::string model;
    std::string api_key_env;
    std::optional<std::filesystem::path> training;  ///< ngram-sim target trained on this JSONL
    int attempts = 3;
    int timeout_seconds = 60;
};

inline BackendConfig backend(std::string kind, std::string api_key_env) {
    BackendConfig b;
    b.kind = std::move(kind);
    b.api_key_env = std::move(api_key_env);
    return b;
}

/// The single JSON audit document with sections corpus, backends, detectors,
/// search, verdict and scenario.
struct AuditConfig {
    std::optional<std::filesystem::path> pro_path;
    std::optional<std::filesystem::path> held_path;

    BackendConfig target = backend("ngram-sim", "AUDIT_TARGET_API_KEY");
    BackendConfig auxiliary = backend("scripted-aux", "AUDIT_AUX_API_KEY");
    BackendConfig reference = backend("unigram", "");
    int in_flight_limit = 8;
    std::optional<std::filesystem::path> cache_dir;  ///< AUDIT_CACHE_DIR overrides when set
    bool use_cache = true;

    reversal::SearchConfig search;
    std::optional<ScenarioSpec> scenario;

    void validate() const;
};

/// Parses the document; relative paths resolve against `base_dir`.
AuditConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
AuditConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const AuditConfig& c);

/// Everything an audit needs, materialized from a config.
struct Runtime {
    corpus::CorpusSplit split;
    detectors::Handles handles;
    std::optional<GroundTruth> truth;
};

/// Builds the scenario when one is configured, otherwise loads the corpora
/// and connects the configured backends.
Runtime prepare_runtime(const AuditConfig& cfg);

}  // namespace laudit::harness
