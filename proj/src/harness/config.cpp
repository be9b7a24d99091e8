#include "laudit/harness/config.hpp"

#include "laudit/cache.hpp"
#include "laudit/errors.hpp"
#include "laudit/harness/scripted_aux.hpp"
#include "laudit/http_backend.hpp"
#include "laudit/sim_backend.hpp"

#include <cstdlib>
#include <fstream>

namespace laudit::harness {

namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base.empty() ? base / path : path;
}

BackendConfig backend_from_json(const json& j, BackendConfig out, const std::filesystem::path& base) {
    out.kind = j.value("kind", out.kind);
    out.base_url = j.value("base_url", out.base_url);
    out.model = j.value("model", out.model);
    out.api_key_env = j.value("api_key_env", out.api_key_env);
    if (j.contains("training")) out.training = resolve(base, j.at("training").get<std::string>());
    out.attempts = j.value("attempts", out.attempts);
    out.timeout_seconds = j.value("timeout_seconds", out.timeout_seconds);
    return out;
}

json backend_to_json(const BackendConfig& b) {
    json j = {{"kind", b.kind}};
    if (!b.base_url.empty()) j["base_url"] = b.base_url;
    if (!b.model.empty()) j["model"] = b.model;
    if (!b.api_key_env.empty()) j["api_key_env"] = b.api_key_env;
    if (b.training) j["training"] = b.training->string();
    j["attempts"] = b.attempts;
    j["timeout_seconds"] = b.timeout_seconds;
    return j;
}

gateway::HttpSettings http_settings(const BackendConfig& b) {
    gateway::HttpSettings s;
    s.base_url = b.base_url;
    s.model = b.model;
    s.api_key_env = b.api_key_env;
    s.attempts = b.attempts;
    s.timeout = std::chrono::seconds(b.timeout_seconds);
    return s;
}

std::shared_ptr<gateway::ResponseCache> make_cache(const AuditConfig& cfg, const std::string& role) {
    if (!cfg.use_cache) return nullptr;
    std::optional<std::filesystem::path> dir = cfg.cache_dir;
    if (const char* env = std::getenv("AUDIT_CACHE_DIR"); env != nullptr && *env != '\0') dir = env;
    if (dir) return std::make_shared<gateway::DiskCache>(*dir / role);
    return std::make_shared<gateway::MemoryCache>();
}

}  // namespace

void AuditConfig::validate() const {
    if (in_flight_limit < 1) throw ValidationError("backends.in_flight_limit must be positive");
    if (target.kind != "ngram-sim" && target.kind != "http") throw ValidationError("unknown target kind '" + target.kind + "'");
    if (auxiliary.kind != "scripted-aux" && auxiliary.kind != "http") {
        throw ValidationError("unknown auxiliary kind '" + auxiliary.kind + "'");
    }
    if (reference.kind != "unigram" && reference.kind != "none") {
        throw ValidationError("unknown reference kind '" + reference.kind + "'");
    }
    if (search.delta < 0.0) throw ValidationError("verdict.delta must be non-negative");
    if (search.theta <= 0.0 || search.theta > 1.0) throw ValidationError("verdict.theta must lie in (0, 1]");
    if (scenario) {
        scenario->validate();
        return;
    }
    if (!pro_path || !held_path) throw ValidationError("corpus.pro and corpus.held are required without a scenario");
    if (target.kind == "ngram-sim" && !target.training) {
        throw ValidationError("an ngram-sim target needs backends.target.training outside a scenario");
    }
    for (const auto* b : {&target, &auxiliary}) {
        if (b->kind == "http" && (b->base_url.empty() || b->model.empty())) {
            throw ValidationError("http backends need base_url and model");
        }
    }
}

AuditConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
    AuditConfig c;
    try {
        if (!j.is_object()) throw ParseError("config must be a JSON object");
        for (const auto& [key, _] : j.items()) {
            if (key != "corpus" && key != "backends" && key != "detectors" && key != "search" && key != "verdict" &&
                key != "scenario") {
                throw ParseError("unknown config section '" + key + "'");
            }
        }
        if (j.contains("corpus")) {
            const auto& s = j.at("corpus");
            if (s.contains("pro")) c.pro_path = resolve(base_dir, s.at("pro").get<std::string>());
            if (s.contains("held")) c.held_path = resolve(base_dir, s.at("held").get<std::string>());
        }
        if (j.contains("backends")) {
            const auto& s = j.at("backends");
            if (s.contains("target")) c.target = backend_from_json(s.at("target"), c.target, base_dir);
            if (s.contains("auxiliary")) c.auxiliary = backend_from_json(s.at("auxiliary"), c.auxiliary, base_dir);
            if (s.contains("reference")) c.reference = backend_from_json(s.at("reference"), c.reference, base_dir);
            c.in_flight_limit = s.value("in_flight_limit", c.in_flight_limit);
            if (s.contains("cache_dir")) c.cache_dir = resolve(base_dir, s.at("cache_dir").get<std::string>());
            c.use_cache = s.value("cache", c.use_cache);
        }
        auto& sc = c.search;
        if (j.contains("detectors")) {
            const auto& s = j.at("detectors");
            sc.detector.id = s.value("primary", sc.detector.id);
            sc.detector.k_percent = s.value("k_percent", sc.detector.k_percent);
            sc.detector.recall_shots = s.value("recall_shots", sc.detector.recall_shots);
            if (s.contains("report")) sc.report_detectors = s.at("report").get<std::vector<std::string>>();
        }
        if (j.contains("search")) {
            const auto& s = j.at("search");
            sc.n = s.value("n", sc.n);
            sc.m = s.value("m", sc.m);
            sc.l = s.value("l", sc.l);
            sc.K = s.value("K", sc.K);
            sc.top_k = s.value("top_k", sc.top_k);
            sc.seed = s.value("seed", sc.seed);
            sc.max_tokens = s.value("max_tokens", sc.max_tokens);
            sc.patience = s.value("patience", sc.patience);
            if (s.contains("select_subsample") && !s.at("select_subsample").is_null()) {
                sc.select_subsample = s.at("select_subsample").get<std::size_t>();
            }
            if (s.contains("objective")) sc.perf.objective = metrics::objective_from_string(s.at("objective").get<std::string>());
            sc.perf.auc_weight = s.value("auc_weight", sc.perf.auc_weight);
        }
        sc.detector.seed = sc.seed;
        if (j.contains("verdict")) {
            const auto& s = j.at("verdict");
            sc.delta = s.value("delta", sc.delta);
            sc.theta = s.value("theta", sc.theta);
        }
        if (j.contains("scenario") && !j.at("scenario").is_null()) c.scenario = scenario_from_json(j.at("scenario"));
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

AuditConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("config " + path.string() + ": " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

json to_json(const AuditConfig& c) {
    json corpus = json::object();
    if (c.pro_path) corpus["pro"] = c.pro_path->string();
    if (c.held_path) corpus["held"] = c.held_path->string();
    json backends = {{"target", backend_to_json(c.target)},
                     {"auxiliary", backend_to_json(c.auxiliary)},
                     {"reference", backend_to_json(c.reference)},
                     {"in_flight_limit", c.in_flight_limit},
                     {"cache", c.use_cache}};
    if (c.cache_dir) backends["cache_dir"] = c.cache_dir->string();
    const auto& s = c.search;
    json search = {{"n", s.n},   {"m", s.m},         {"l", s.l},
                   {"K", s.K},   {"top_k", s.top_k}, {"seed", s.seed},
                   {"max_tokens", s.max_tokens},     {"patience", s.patience},
                   {"objective", metrics::to_string(s.perf.objective)},
                   {"auc_weight", s.perf.auc_weight}};
    search["select_subsample"] = s.select_subsample ? json(*s.select_subsample) : json(nullptr);
    return {{"corpus", corpus},
            {"backends", backends},
            {"detectors",
             {{"primary", s.detector.id},
              {"k_percent", s.detector.k_percent},
              {"recall_shots", s.detector.recall_shots},
              {"report", s.report_detectors}}},
            {"search", search},
            {"verdict", {{"delta", s.delta}, {"theta", s.theta}}},
            {"scenario", c.scenario ? to_json(*c.scenario) : json(nullptr)}};
}

Runtime prepare_runtime(const AuditConfig& cfg) {
    cfg.validate();
    auto limiter = std::make_shared<gateway::InFlightLimiter>(cfg.in_flight_limit);
    Runtime rt{.split = {}, .handles = {.target = make_scripted_aux(), .reference = {}, .auxiliary = {}}, .truth = {}};
    if (cfg.scenario) {
        auto sc = build_scenario(*cfg.scenario);
        rt.split = std::move(sc.split);
        rt.handles = sc.handles();
        rt.truth = std::move(sc.truth);
        if (!cfg.use_cache) {
            rt.handles.target.set_cache(nullptr);
            rt.handles.auxiliary->set_cache(nullptr);
        }
    } else {
        rt.split.pro = corpus::load_jsonl(*cfg.pro_path);
        rt.split.held = corpus::load_jsonl(*cfg.held_path);
        rt.split.validate();
        if (cfg.target.kind == "http") {
            rt.handles.target = gateway::make_http_target(http_settings(cfg.target));
        } else {
            const auto training = corpus::load_jsonl(*cfg.target.training);
            auto model = std::make_shared<const gateway::NgramMemorizer>(
                gateway::NgramMemorizer::train(training, cfg.scenario ? cfg.scenario->order : 3));
            rt.handles.target = gateway::make_ngram_handle(model, "ngram-sim");
        }
        rt.handles.auxiliary = cfg.auxiliary.kind == "http" ? gateway::make_http_auxiliary(http_settings(cfg.auxiliary))
                                                            : make_scripted_aux();
        if (cfg.reference.kind == "unigram") rt.handles.reference = detectors::make_reference_handle();
        rt.handles.target.set_cache(make_cache(cfg, "target"));
        rt.handles.auxiliary->set_cache(make_cache(cfg, "auxiliary"));
    }
    if (cfg.reference.kind == "none") rt.handles.reference.reset();
    rt.handles.target.set_limiter(limiter);
    rt.handles.auxiliary->set_limiter(limiter);
    return rt;
}

}  // namespace laudit::harness
