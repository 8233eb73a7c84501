// Python bindings: metric primitives plus the file-based pipeline commands.
// Reports come back as JSON strings; the python package parses them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "dce/errors.hpp"
#include "dce/generator.hpp"
#include "dce/layers.hpp"
#include "dce/metrics.hpp"
#include "dce/pipeline.hpp"
#include "dce/run_config.hpp"

namespace py = pybind11;

namespace {

dce::RunConfig config_or_default(const std::string& config_path) {
    if (config_path.empty()) return dce::RunConfig{};
    return dce::load_run_config(config_path);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "session and customer embedding pipeline core";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const dce::ConfigError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const dce::IoError& e) {
            PyErr_SetString(PyExc_OSError, e.what());
        } catch (const dce::NumericError& e) {
            PyErr_SetString(PyExc_ArithmeticError, e.what());
        } catch (const dce::Error& e) {
            PyErr_SetString(PyExc_RuntimeError, e.what());
        }
    });

    m.def(
        "cosine_distance",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            return dce::cosine_distance(a, b);
        },
        py::arg("a"), py::arg("b"), "1 - cos(a, b) with epsilon-guarded norms");

    m.def("auroc", &dce::auroc, py::arg("scores"), py::arg("labels"),
          "Mann-Whitney AUROC with midrank tie handling");

    m.def(
        "macro_auroc",
        [](const std::vector<std::vector<double>>& scores,
           const std::vector<std::vector<int>>& positives, std::size_t n_classes) {
            const dce::MacroAurocResult r = dce::macro_auroc(scores, positives, n_classes);
            py::dict d;
            d["macro"] = r.macro;
            d["per_class"] = r.per_class;
            d["skipped"] = r.skipped;
            return d;
        },
        py::arg("scores"), py::arg("positives"), py::arg("n_classes"));

    m.def(
        "recall_at_rate",
        [](const std::vector<double>& scores, const std::vector<int>& labels, double rate) {
            const dce::RecallAtRateResult r = dce::recall_at_rate(scores, labels, rate);
            py::dict d;
            d["recall"] = r.recall;
            d["flagged"] = r.flagged;
            d["hits"] = r.hits;
            d["positives"] = r.positives;
            return d;
        },
        py::arg("scores"), py::arg("labels"), py::arg("rate"));

    m.def(
        "generate",
        [](const std::string& out, const std::string& config, py::object seed) {
            dce::GenConfig gc = config_or_default(config).gen;
            if (!seed.is_none()) gc.seed = seed.cast<std::uint64_t>();
            return dce::cmd_generate(gc, out).dump();
        },
        py::arg("out"), py::arg("config") = std::string(), py::arg("seed") = py::none(),
        "Generate a synthetic population dataset; returns a JSON summary string");

    m.def(
        "train",
        [](const std::string& stage, const std::string& data, const std::string& out,
           const std::string& sae, const std::string& config) {
            dce::cmd_train(stage, data, config_or_default(config), sae, out);
        },
        py::arg("stage"), py::arg("data"), py::arg("out"), py::arg("sae") = std::string(),
        py::arg("config") = std::string(),
        "Train one pipeline stage: sae, dce, fused or ema");

    m.def(
        "evaluate",
        [](const std::string& task, const std::string& data, const std::string& sae,
           const std::string& dce_path, const std::string& out, const std::string& fused,
           const std::string& ema, double rate, const std::string& config) {
            const dce::RunConfig rc = config_or_default(config);
            if (task == "fraud" && rate < 0.0) rate = rc.challenge_rate;
            return dce::cmd_eval(task, data, rc, sae, dce_path, fused, ema, rate, out).dump();
        },
        py::arg("task"), py::arg("data"), py::arg("sae"), py::arg("dce"), py::arg("out"),
        py::arg("fused") = std::string(), py::arg("ema") = std::string(),
        py::arg("rate") = -1.0, py::arg("config") = std::string(),
        "Evaluate a downstream task; returns the machine report as a JSON string");
}
