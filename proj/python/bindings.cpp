#include "laudit/errors.hpp"
#include "laudit/harness/cli.hpp"
#include "laudit/harness/config.hpp"
#include "laudit/harness/report.hpp"
#include "laudit/harness/scenario.hpp"
#include "laudit/harness/scripted_aux.hpp"
#include "laudit/metrics.hpp"
#include "laudit/registers.hpp"
#include "laudit/search.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

namespace py = pybind11;
using namespace laudit;

namespace {

// Scenario audit; both results as JSON text.
py::dict scenario_audit(const std::string& spec_json, const std::string& search_json) {
    const auto spec = harness::scenario_from_json(nlohmann::json::parse(spec_json));
    nlohmann::json cfg_doc = {{"scenario", harness::to_json(spec)}};
    if (!search_json.empty()) cfg_doc["search"] = nlohmann::json::parse(search_json);
    const auto cfg = harness::config_from_json(cfg_doc);
    std::string verdict, trace, truth;
    {
        py::gil_scoped_release release;
        const auto sc = harness::build_scenario(spec);
        const auto r = reversal::audit(sc.split, sc.handles(), cfg.search);
        verdict = harness::dump_json(reversal::to_json(r.verdict));
        trace = harness::dump_json(reversal::to_json(r.trace));
        truth = harness::dump_json(harness::to_json(sc.truth));
    }
    py::dict out;
    out["verdict"] = verdict;
    out["trace"] = trace;
    out["ground_truth"] = truth;
    return out;
}

}  // namespace

PYBIND11_MODULE(_laudit, m) {
    m.doc() = "Laundering audit core";

    py::register_exception<Error>(m, "LauditError");

    using Scores = std::vector<double>;
    m.def("auc", [](const Scores& a, const Scores& b) { return metrics::auc(a, b); }, py::arg("members"),
          py::arg("nonmembers"));
    m.def("asr", [](const Scores& a, const Scores& b) { return metrics::asr(a, b); }, py::arg("members"),
          py::arg("nonmembers"));
    m.def("tpr_at_fpr", [](const Scores& a, const Scores& b, double level) { return metrics::tpr_at_fpr(a, b, level); },
          py::arg("members"), py::arg("nonmembers"), py::arg("fpr_level"));

    m.def("registers", [] {
        std::vector<std::tuple<int, std::string, std::string>> out;
        for (const auto& r : reversal::catalog()) out.emplace_back(r.id, r.name, r.abbreviation);
        return out;
    });
    m.def("laundering_prompt", [](int reg, const std::vector<std::string>& rules) {
        return harness::laundering_prompt(reg, rules);
    }, py::arg("register_id"), py::arg("rules") = std::vector<std::string>{});
    m.def("launder", [](int reg, const std::string& text, const std::vector<std::string>& rules) {
        return harness::launder(reg, rules, text);
    }, py::arg("register_id"), py::arg("text"), py::arg("rules") = std::vector<std::string>{});

    m.def("scenario_audit", &scenario_audit, py::arg("spec_json") = "{}", py::arg("search_json") = "");
    m.def("run_cli", [](const std::vector<std::string>& args) {
        py::gil_scoped_release release;
        return harness::run_cli(args);
    }, py::arg("args"));
}
