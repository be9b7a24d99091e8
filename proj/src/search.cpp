#include "laudit/search.hpp"

#include "laudit/errors.hpp"
#include "laudit/parallel.hpp"
#include "laudit/rng.hpp"

#include <algorithm>
#include <cmath>

namespace laudit::reversal {

namespace {

constexpr std::uint64_t kTemplateStream = 0x7e3a11;
constexpr std::uint64_t kConfStream = 0xc0f1de;
constexpr std::uint64_t kInferenceStream = 0x1f3e00;
constexpr std::uint64_t kSubsampleStream = 0x5b5a3e;

void note(std::vector<std::string>* log, std::string line) {
    if (log) log->push_back(std::move(line));
}

}  // namespace

std::string standard_prompt_request(const Register& r) { return std::string(kStandardPromptInstruction) + r.name + "."; }

void SearchConfig::validate(const CorpusSplit& split) const {
    if (n == 0 || m == 0 || l == 0) throw ValidationError("search sizes n, m, l must be positive");
    if (top_k == 0) throw ValidationError("top_k must be positive");
    if (K < 0) throw ValidationError("K must be non-negative");
    if (max_tokens < 1) throw ValidationError("max_tokens must be >= 1");
    if (patience < 1) throw ValidationError("patience must be >= 1");
    if (n > split.pro.size() || m > split.pro.size() || l > split.pro.size()) {
        throw SizeError("n, m and l must not exceed the number of pro samples (" + std::to_string(split.pro.size()) + ")");
    }
    if (!(theta >= 0.0 && theta <= 1.0) || !(delta >= 0.0 && delta <= 1.0)) {
        throw ValidationError("verdict thresholds must lie in [0, 1]");
    }
}

std::map<int, RewritePrompt> build_standard_prompts(const ModelHandle& aux, const std::vector<Register>& registers,
                                                    std::vector<std::string>* log) {
    struct Outcome {
        std::optional<RewritePrompt> prompt;
        std::string error;
    };
    auto outcomes = parallel_map<Outcome>(registers.size(), [&](std::size_t i) {
        const auto& r = registers[i];
        try {
            const std::vector<std::string> materials = {r.name};
            auto text = aux.instruct(standard_prompt_request(r), materials);
            RewritePrompt p;
            p.text = corpus::normalize_text(text);
            if (p.text.empty()) throw ValidationError("empty standard prompt");
            p.register_id = r.id;
            return Outcome{p, {}};
        } catch (const Error& e) {
            return Outcome{std::nullopt, e.what()};
        }
    });
    std::map<int, RewritePrompt> out;
    for (std::size_t i = 0; i < registers.size(); ++i) {
        if (outcomes[i].prompt) {
            out.emplace(registers[i].id, *outcomes[i].prompt);
        } else {
            note(log, "standard prompt for register " + registers[i].abbreviation + " failed: " + outcomes[i].error);
        }
    }
    if (out.empty()) throw TransportError("no register produced a standard prompt");
    return out;
}

OpeningTemplate build_opening_template(const ModelHandle& aux, const Register& reg, const RewritePrompt& standard,
                                       std::span<const TextSample> pro, const SearchConfig& cfg,
                                       std::vector<std::string>* log) {
    if (cfg.n == 0) throw ValidationError("n must be positive");
    if (cfg.n > pro.size()) throw SizeError("n exceeds the number of pro samples");
    const auto sample = corpus::uniform_sample(pro, cfg.n, mix64(cfg.seed, kTemplateStream));
    try {
        std::vector<std::string> openings;
        openings.reserve(sample.size());
        for (const auto& s : sample) openings.push_back(corpus::first_sentence(aux.rewrite(standard, s.text, s.id)));
        OpeningTemplate t{reg.id, corpus::normalize_text(aux.instruct(kTemplateInstruction, openings)), false};
        t.validate();
        return t;
    } catch (const Error& e) {
        note(log, "template extraction for register " + reg.abbreviation + " fell back to the fixture: " + e.what());
    }
    OpeningTemplate t{reg.id, std::string(opening_template_fixture(reg.id)), true};
    t.validate();
    return t;
}

double register_confidence(const ModelHandle& target, const ModelHandle& aux, const Register& reg,
                           const OpeningTemplate& tmpl, std::span<const TextSample> pro, const SearchConfig& cfg,
                           std::size_t* used, std::vector<std::string>* log) {
    if (cfg.m == 0) throw ValidationError("m must be positive");
    if (cfg.m > pro.size()) throw SizeError("m exceeds the number of pro samples");
    const auto sample = corpus::uniform_sample(pro, cfg.m, mix64(cfg.seed, kConfStream));
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& s : sample) {
        const std::vector<std::string> materials = {tmpl.text, corpus::first_sentence(s.text)};
        const auto opening = aux.instruct(kRewriteAsTemplateInstruction, materials);
        const auto c = target.generate_continuation(opening, cfg.max_tokens);
        if (c.step_max_probs.empty()) {
            note(log, "register " + reg.abbreviation + ": empty continuation for sample " + s.id + ", skipped");
            continue;
        }
        double mean = 0.0;
        for (double p : c.step_max_probs) mean += p;
        sum += mean / static_cast<double>(c.step_max_probs.size());
        ++count;
    }
    if (used) *used = count;
    if (count == 0) throw ValidationError("register " + reg.abbreviation + ": every continuation was empty");
    return sum / static_cast<double>(count);
}

std::vector<int> shortlist(const std::map<int, double>& conf, std::size_t top_k) {
    std::vector<std::pair<int, double>> v(conf.begin(), conf.end());
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        return a.second > b.second || (a.second == b.second && a.first < b.first);
    });
    std::vector<int> out;
    for (std::size_t i = 0; i < v.size() && i < top_k; ++i) out.push_back(v[i].first);
    return out;
}

DetectionReport evaluate_prompt(const CorpusSplit& split, const RewritePrompt& p, const Handles& handles,
                                const SearchConfig& cfg) {
    if (p.text.empty()) throw ValidationError("cannot evaluate an empty prompt");
    return metrics::make_report(detectors::run_detector(cfg.detector, handles, split, p), cfg.perf);
}

namespace {

CorpusSplit selection_split(const CorpusSplit& split, const SearchConfig& cfg) {
    if (!cfg.select_subsample) return split;
    const std::size_t k = *cfg.select_subsample;
    CorpusSplit out;
    out.pro = corpus::uniform_sample(split.pro, std::min(k, split.pro.size()), mix64(cfg.seed, kSubsampleStream));
    out.held = corpus::uniform_sample(split.held, std::min(k, split.held.size()), mix64(cfg.seed, kSubsampleStream + 1));
    return out;
}

}  // namespace

Selection select_register(const std::vector<int>& candidates, const std::map<int, RewritePrompt>& prompts,
                          const Handles& handles, const CorpusSplit& split, const SearchConfig& cfg) {
    if (candidates.empty()) throw ValidationError("select_register needs at least one candidate");
    const CorpusSplit eval_split = selection_split(split, cfg);
    auto outcomes = parallel_map<CandidateOutcome>(candidates.size(), [&](std::size_t i) {
        CandidateOutcome o;
        o.register_id = candidates[i];
        try {
            auto it = prompts.find(candidates[i]);
            if (it == prompts.end()) throw ValidationError("no standard prompt");
            o.prompt = it->second.text;
            o.report = evaluate_prompt(eval_split, it->second, handles, cfg);
        } catch (const Error& e) {
            o.error = e.what();
        }
        return o;
    }, std::min<std::size_t>(candidates.size(), 4));

    const CandidateOutcome* best = nullptr;
    for (const auto& o : outcomes) {
        if (!o.report) continue;
        if (!best || o.report->perf > best->report->perf ||
            (o.report->perf == best->report->perf && o.register_id < best->register_id)) {
            best = &o;
        }
    }
    if (!best) throw ValidationError("every shortlisted register was disqualified");
    return Selection{best->register_id, prompts.at(best->register_id), std::move(outcomes)};
}

Inference condition_inference(std::span<const TextSample> pro, const RewritePrompt& p, const ModelHandle& target,
                              const ModelHandle& aux, const SearchConfig& cfg, int round,
                              std::vector<std::string>* log) {
    if (cfg.l == 0) throw ValidationError("l must be positive");
    if (cfg.l > pro.size()) throw SizeError("l exceeds the number of pro samples");
    const auto sample = corpus::uniform_sample(pro, cfg.l, mix64(cfg.seed, kInferenceStream + static_cast<std::uint64_t>(round)));

    struct Outcome {
        std::optional<std::string> answer;
        std::string error;
    };
    auto outcomes = parallel_map<Outcome>(sample.size(), [&](std::size_t i) {
        const auto& s = sample[i];
        try {
            const std::string rewritten = aux.rewrite(p, s.text, s.id);
            const std::string head = corpus::first_sentence(rewritten);
            const auto c = target.generate_continuation(head, cfg.max_tokens);
            const std::string continued = c.text.empty() ? head : head + " " + c.text;
            const std::vector<std::string> materials = {p.text, rewritten, continued};
            return Outcome{aux.instruct(kEditInstruction, materials), {}};
        } catch (const Error& e) {
            return Outcome{std::nullopt, e.what()};
        }
    });
    std::vector<std::string> history;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].answer) {
            history.push_back(*outcomes[i].answer);
        } else {
            note(log, "condition inference round " + std::to_string(round) + ": sample " + sample[i].id +
                          " dropped: " + outcomes[i].error);
        }
    }
    if (history.empty()) throw ValidationError("condition inference: every sample failed");
    auto distilled = corpus::normalize_text(aux.instruct(kDistillInstruction, history));
    Inference out{p.refine(std::move(distilled)), std::move(history)};
    return out;
}

Refinement refine_loop(const CorpusSplit& split, const RewritePrompt& p0, const Handles& handles,
                       const SearchConfig& cfg, std::optional<DetectionReport> p0_report,
                       std::vector<std::string>* log) {
    if (cfg.K < 0) throw ValidationError("K must be non-negative");
    if (!handles.auxiliary) throw ValidationError("refinement needs an auxiliary model");
    Refinement r{p0, p0_report ? *p0_report : evaluate_prompt(split, p0, handles, cfg), {}};
    int rejections = 0;
    for (int k = 0; k < cfg.K; ++k) {
        IterationRecord rec;
        rec.index = k + 1;
        rec.incumbent_perf = r.report.perf;
        try {
            auto inf = condition_inference(split.pro, r.prompt, handles.target, *handles.auxiliary, cfg, k, log);
            rec.prompt = std::move(inf.prompt);
            rec.proposals = std::move(inf.proposals);
            rec.report = evaluate_prompt(split, rec.prompt, handles, cfg);
        } catch (const Error& e) {
            throw Error("refinement iteration " + std::to_string(k + 1) + ": " + e.what());
        }
        rec.accepted = rec.report.perf > r.report.perf;
        if (rec.accepted) {
            r.prompt = rec.prompt;
            r.report = rec.report;
            rejections = 0;
        } else {
            ++rejections;
        }
        r.iterations.push_back(std::move(rec));
        if (rejections >= cfg.patience) {
            note(log, "refinement stopped after " + std::to_string(rejections) + " consecutive rejections");
            break;
        }
    }
    return r;
}

Stage1 identify_register(const CorpusSplit& split, const Handles& handles, const SearchConfig& cfg,
                         std::vector<std::string>* log) {
    if (!handles.auxiliary) throw ValidationError("register identification needs an auxiliary model");
    const auto& aux = *handles.auxiliary;
    Stage1 s;
    s.standard_prompts = build_standard_prompts(aux, catalog(), log);

    std::vector<int> ids;
    for (const auto& [id, _] : s.standard_prompts) ids.push_back(id);

    struct Scored {
        RegisterConfidence conf;
        std::vector<std::string> log;
    };
    auto scored = parallel_map<Scored>(ids.size(), [&](std::size_t i) {
        Scored out;
        const auto& reg = register_by_id(ids[i]);
        out.conf.register_id = reg.id;
        try {
            auto tmpl = build_opening_template(aux, reg, s.standard_prompts.at(reg.id), split.pro, cfg, &out.log);
            out.conf.template_text = tmpl.text;
            out.conf.template_from_fixture = tmpl.from_fixture;
            out.conf.conf = register_confidence(handles.target, aux, reg, tmpl, split.pro, cfg, &out.conf.samples_used, &out.log);
        } catch (const Error& e) {
            out.log.push_back("register " + reg.abbreviation + " has no confidence: " + e.what());
        }
        return out;
    });

    std::map<int, double> conf;
    for (auto& sc : scored) {
        for (auto& line : sc.log) note(log, std::move(line));
        if (sc.conf.conf) conf[sc.conf.register_id] = *sc.conf.conf;
        s.confidences.push_back(std::move(sc.conf));
    }
    if (conf.empty()) throw ValidationError("no register produced a confidence score");
    s.shortlist = shortlist(conf, cfg.top_k);
    s.selection = select_register(s.shortlist, s.standard_prompts, handles, split, cfg);
    for (const auto& o : s.selection.outcomes) {
        if (!o.error.empty()) note(log, "register " + register_by_id(o.register_id).abbreviation + " disqualified: " + o.error);
    }
    // The selection report may be on a subsample; Perf for stage 2 uses the full split.
    if (cfg.select_subsample) {
        s.report = evaluate_prompt(split, s.selection.prompt, handles, cfg);
    } else {
        for (const auto& o : s.selection.outcomes) {
            if (o.register_id == s.selection.register_id) s.report = *o.report;
        }
    }
    return s;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::LaunderingEvidence: return "laundering-evidence";
        case Verdict::DirectMembership: return "direct-membership";
        case Verdict::NoEvidence: return "no-evidence";
    }
    return "no-evidence";
}

Verdict verdict_from_string(const std::string& s) {
    if (s == "laundering-evidence") return Verdict::LaunderingEvidence;
    if (s == "direct-membership") return Verdict::DirectMembership;
    if (s == "no-evidence") return Verdict::NoEvidence;
    throw ParseError("unknown verdict '" + s + "'");
}

Verdict decide_verdict(double baseline_perf, double best_perf, double delta, double theta) {
    if (baseline_perf >= theta) return Verdict::DirectMembership;
    if (best_perf >= baseline_perf + delta && best_perf >= theta) return Verdict::LaunderingEvidence;
    return Verdict::NoEvidence;
}

namespace {

std::map<std::string, std::uint64_t> diff_requests(const gateway::CallStats& before, const gateway::CallStats& after) {
    std::map<std::string, std::uint64_t> out;
    for (const auto& [op, n] : after.requests) {
        auto it = before.requests.find(op);
        const std::uint64_t prev = it == before.requests.end() ? 0 : it->second;
        if (n > prev) out[op] = n - prev;
    }
    return out;
}

void per_detector_reports(AuditVerdict& v, const CorpusSplit& split, const Handles& handles, const SearchConfig& cfg) {
    std::optional<CorpusSplit> surrogates;
    if (v.final_prompt && handles.auxiliary) surrogates = detectors::synthesize(*handles.auxiliary, split, *v.final_prompt);
    for (const auto& id : cfg.report_detectors) {
        auto dcfg = cfg.detector;
        dcfg.id = id;
        try {
            detectors::Detector det(dcfg, handles, split);
            v.baseline_by_detector[id] = metrics::make_report(detectors::score_split(det, handles, split), cfg.perf);
            if (surrogates) {
                v.final_by_detector[id] = metrics::make_report(
                    detectors::score_split(det, handles, *surrogates, v.final_prompt->hash()), cfg.perf);
            }
        } catch (const UnsupportedDetectorError& e) {
            v.skipped_detectors[id] = e.what();
        } catch (const ValidationError& e) {
            v.skipped_detectors[id] = e.what();
        }
    }
}

}  // namespace

AuditResult audit(const CorpusSplit& split, const Handles& handles, const SearchConfig& cfg) {
    split.validate();
    cfg.validate(split);
    const auto target_before = handles.target.stats();
    const auto aux_before = handles.auxiliary ? handles.auxiliary->stats() : gateway::CallStats{};

    AuditResult res;
    auto& t = res.trace;
    auto& v = res.verdict;
    t.detector_id = cfg.detector.id;
    v.delta = cfg.delta;
    v.theta = cfg.theta;

    v.baseline_report = metrics::make_report(detectors::run_detector(cfg.detector, handles, split), cfg.perf);
    if (v.baseline_report.perf >= cfg.theta) {
        t.log.push_back("baseline Perf on originals reaches theta; search skipped");
        v.verdict = Verdict::DirectMembership;
        v.best_report = v.baseline_report;
    } else {
        auto s1 = identify_register(split, handles, cfg, &t.log);
        t.confidences = s1.confidences;
        t.shortlist = s1.shortlist;
        t.candidates = s1.selection.outcomes;
        t.selected_register = s1.selection.register_id;
        t.stage1_prompt = s1.selection.prompt;
        t.stage1_report = s1.report;

        auto s2 = refine_loop(split, s1.selection.prompt, handles, cfg, s1.report, &t.log);
        t.iterations = s2.iterations;
        t.final_prompt = s2.prompt;
        t.final_report = s2.report;

        v.selected_register = s1.selection.register_id;
        v.final_prompt = s2.prompt;
        v.best_report = s2.report;
        v.verdict = decide_verdict(v.baseline_report.perf, v.best_report.perf, cfg.delta, cfg.theta);
    }
    v.delta_margin = v.best_report.perf - (v.baseline_report.perf + cfg.delta);
    v.theta_margin = v.best_report.perf - cfg.theta;
    per_detector_reports(v, split, handles, cfg);

    t.requests["target"] = diff_requests(target_before, handles.target.stats());
    if (handles.auxiliary) t.requests["auxiliary"] = diff_requests(aux_before, handles.auxiliary->stats());
    return res;
}

// ---- JSON -------------------------------------------------------------------

nlohmann::json to_json(const RewritePrompt& p) {
    nlohmann::json j = {{"text", p.text}, {"generation", p.generation}, {"hash", p.hash()}};
    j["register_id"] = p.register_id ? nlohmann::json(*p.register_id) : nlohmann::json(nullptr);
    j["parent_hash"] = p.parent_hash ? nlohmann::json(*p.parent_hash) : nlohmann::json(nullptr);
    return j;
}

RewritePrompt prompt_from_json(const nlohmann::json& j) {
    RewritePrompt p;
    p.text = j.at("text").get<std::string>();
    p.generation = j.value("generation", 0);
    if (j.contains("register_id") && !j["register_id"].is_null()) p.register_id = j["register_id"].get<int>();
    if (j.contains("parent_hash") && !j["parent_hash"].is_null()) p.parent_hash = j["parent_hash"].get<std::string>();
    return p;
}

namespace {

nlohmann::json opt_report(const std::optional<DetectionReport>& r) {
    return r ? metrics::to_json(*r) : nlohmann::json(nullptr);
}

std::optional<DetectionReport> opt_report_from(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    return metrics::report_from_json(j);
}

}  // namespace

nlohmann::json to_json(const SearchTrace& t) {
    nlohmann::json j;
    j["detector_id"] = t.detector_id;
    j["rewrite_as_template_instruction"] = t.rewrite_as_template_instruction;
    auto& conf = j["confidences"] = nlohmann::json::array();
    for (const auto& c : t.confidences) {
        conf.push_back({{"register_id", c.register_id},
                        {"register", register_by_id(c.register_id).abbreviation},
                        {"template", c.template_text},
                        {"template_from_fixture", c.template_from_fixture},
                        {"conf", c.conf ? nlohmann::json(*c.conf) : nlohmann::json(nullptr)},
                        {"samples_used", c.samples_used}});
    }
    j["shortlist"] = t.shortlist;
    auto& cand = j["candidates"] = nlohmann::json::array();
    for (const auto& c : t.candidates) {
        cand.push_back({{"register_id", c.register_id}, {"prompt", c.prompt}, {"report", opt_report(c.report)}, {"error", c.error}});
    }
    j["selected_register"] = t.selected_register ? nlohmann::json(*t.selected_register) : nlohmann::json(nullptr);
    j["stage1_prompt"] = t.stage1_prompt ? to_json(*t.stage1_prompt) : nlohmann::json(nullptr);
    j["stage1_report"] = opt_report(t.stage1_report);
    auto& its = j["iterations"] = nlohmann::json::array();
    for (const auto& it : t.iterations) {
        its.push_back({{"index", it.index},
                       {"prompt", to_json(it.prompt)},
                       {"proposals", it.proposals},
                       {"report", metrics::to_json(it.report)},
                       {"perf", it.report.perf},
                       {"incumbent_perf", it.incumbent_perf},
                       {"accepted", it.accepted}});
    }
    j["final_prompt"] = t.final_prompt ? to_json(*t.final_prompt) : nlohmann::json(nullptr);
    j["final_report"] = opt_report(t.final_report);
    j["requests"] = t.requests;
    j["log"] = t.log;
    return j;
}

SearchTrace trace_from_json(const nlohmann::json& j) {
    try {
        SearchTrace t;
        t.detector_id = j.at("detector_id").get<std::string>();
        t.rewrite_as_template_instruction = j.value("rewrite_as_template_instruction", std::string());
        for (const auto& c : j.at("confidences")) {
            RegisterConfidence rc;
            rc.register_id = c.at("register_id").get<int>();
            rc.template_text = c.value("template", std::string());
            rc.template_from_fixture = c.value("template_from_fixture", false);
            if (!c.at("conf").is_null()) rc.conf = c["conf"].get<double>();
            rc.samples_used = c.value("samples_used", std::size_t{0});
            t.confidences.push_back(std::move(rc));
        }
        t.shortlist = j.at("shortlist").get<std::vector<int>>();
        for (const auto& c : j.at("candidates")) {
            t.candidates.push_back({c.at("register_id").get<int>(), c.value("prompt", std::string()), opt_report_from(c.at("report")),
                                    c.value("error", std::string())});
        }
        if (!j.at("selected_register").is_null()) t.selected_register = j["selected_register"].get<int>();
        if (!j.at("stage1_prompt").is_null()) t.stage1_prompt = prompt_from_json(j["stage1_prompt"]);
        t.stage1_report = opt_report_from(j.at("stage1_report"));
        for (const auto& it : j.at("iterations")) {
            IterationRecord rec;
            rec.index = it.at("index").get<int>();
            rec.prompt = prompt_from_json(it.at("prompt"));
            rec.proposals = it.value("proposals", std::vector<std::string>{});
            rec.report = metrics::report_from_json(it.at("report"));
            rec.accepted = it.at("accepted").get<bool>();
            rec.incumbent_perf = it.value("incumbent_perf", 0.0);
            t.iterations.push_back(std::move(rec));
        }
        if (!j.at("final_prompt").is_null()) t.final_prompt = prompt_from_json(j["final_prompt"]);
        t.final_report = opt_report_from(j.at("final_report"));
        t.requests = j.value("requests", decltype(t.requests){});
        t.log = j.value("log", std::vector<std::string>{});
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed trace: ") + e.what());
    }
}

nlohmann::json to_json(const AuditVerdict& v) {
    nlohmann::json base = nlohmann::json::object(), fin = nlohmann::json::object();
    for (const auto& [id, r] : v.baseline_by_detector) base[id] = metrics::to_json(r);
    for (const auto& [id, r] : v.final_by_detector) fin[id] = metrics::to_json(r);
    return {{"verdict", to_string(v.verdict)},
            {"baseline_report", metrics::to_json(v.baseline_report)},
            {"best_report", metrics::to_json(v.best_report)},
            {"selected_register", v.selected_register ? nlohmann::json(*v.selected_register) : nlohmann::json(nullptr)},
            {"selected_register_abbreviation",
             v.selected_register ? nlohmann::json(register_by_id(*v.selected_register).abbreviation) : nlohmann::json(nullptr)},
            {"final_prompt", v.final_prompt ? to_json(*v.final_prompt) : nlohmann::json(nullptr)},
            {"delta", v.delta},
            {"theta", v.theta},
            {"delta_margin", v.delta_margin},
            {"theta_margin", v.theta_margin},
            {"baseline_by_detector", base},
            {"final_by_detector", fin},
            {"skipped_detectors", v.skipped_detectors},
            {"trace_ref", v.trace_ref}};
}

AuditVerdict verdict_json_to_struct(const nlohmann::json& j) {
    try {
        AuditVerdict v;
        v.verdict = verdict_from_string(j.at("verdict").get<std::string>());
        v.baseline_report = metrics::report_from_json(j.at("baseline_report"));
        v.best_report = metrics::report_from_json(j.at("best_report"));
        if (!j.at("selected_register").is_null()) v.selected_register = j["selected_register"].get<int>();
        if (!j.at("final_prompt").is_null()) v.final_prompt = prompt_from_json(j["final_prompt"]);
        v.delta = j.at("delta").get<double>();
        v.theta = j.at("theta").get<double>();
        v.delta_margin = j.at("delta_margin").get<double>();
        v.theta_margin = j.at("theta_margin").get<double>();
        for (const auto& [id, r] : j.at("baseline_by_detector").items()) v.baseline_by_detector[id] = metrics::report_from_json(r);
        for (const auto& [id, r] : j.at("final_by_detector").items()) v.final_by_detector[id] = metrics::report_from_json(r);
        v.skipped_detectors = j.value("skipped_detectors", std::map<std::string, std::string>{});
        v.trace_ref = j.value("trace_ref", std::string("trace.json"));
        return v;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed verdict: ") + e.what());
    }
}

}  // namespace laudit::reversal
