#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gaitpd/analysis.hpp"
#include "gaitpd/baseline_wbam.hpp"
#include "gaitpd/config.hpp"
#include "gaitpd/detector.hpp"
#include "gaitpd/ingest.hpp"
#include "gaitpd/optimize.hpp"
#include "gaitpd/synth.hpp"

namespace py = pybind11;
using namespace gaitpd;

namespace {

ingest::TrialRecording load(const std::string& csv, const std::optional<std::string>& label, const RunConfig& cfg,
                            const std::string& trial_id) {
    const double rate = cfg.sample_rate ? *cfg.sample_rate : ingest::infer_sample_rate(csv);
    auto trial = ingest::parse_trial(csv, rate, trial_id);
    if (label) trial.perturbation = ingest::label_from_json(*label);
    return trial;
}

py::dict row_dict(const detector::TrialRow& r) {
    py::dict d;
    d["trial_id"] = r.trial_id;
    d["tp"] = r.tp;
    d["fp"] = r.fp;
    d["tn"] = r.tn;
    d["fn"] = r.fn;
    d["delay_pct"] = r.delay_pct;
    d["detection_sample"] = r.detection_sample;
    d["onset_sample"] = r.onset_sample;
    return d;
}

std::vector<ingest::TrialRecording> trial_set(const std::vector<std::string>& csvs,
                                              const std::vector<std::optional<std::string>>& labels,
                                              const RunConfig& cfg) {
    if (csvs.empty()) return synth::generate_matrix(cfg.gait_model, cfg.matrix);
    if (!labels.empty() && labels.size() != csvs.size()) {
        throw Error(ErrorCode::InvalidConfig, "labels must match trials one to one");
    }
    std::vector<ingest::TrialRecording> out;
    for (std::size_t i = 0; i < csvs.size(); ++i) {
        out.push_back(load(csvs[i], labels.empty() ? std::nullopt : labels[i], cfg, "trial" + std::to_string(i)));
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Kinematic ground-perturbation detector";
    static py::exception<Error> error(m, "GaitpdError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(error, e.what());
        }
    });

    m.def("default_config", [] { return run_config_to_json(RunConfig{}); },
          "Default run configuration as JSON text.");

    m.def("alpha", [](double x, double mean, double sd, double k) {
        const auto a = detector::alpha(x, mean, sd, k);
        return py::make_tuple(a.magnitude, a.sign);
    }, py::arg("x"), py::arg("mean"), py::arg("sd"), py::arg("k") = 2.0,
          "Band exceedance as (magnitude, sign).");

    m.def("phi", [](const std::vector<double>& alphas, const std::vector<double>& covs) {
        if (alphas.size() != covs.size()) throw Error(ErrorCode::InvalidConfig, "alphas and covs differ in length");
        return detector::phi(alphas, covs);
    }, py::arg("alphas"), py::arg("covs"));

    m.def("simulate", [](const std::string& config_json, std::optional<std::uint64_t> seed, const std::string& trial_id) {
        auto cfg = parse_run_config(config_json);
        if (seed) cfg.gait_model.seed = *seed;
        const auto t = synth::generate_trial(cfg.gait_model, cfg.perturbation, trial_id);
        return py::make_tuple(ingest::serialize_trial(t), ingest::label_to_json(t.perturbation));
    }, py::arg("config_json") = "{}", py::arg("seed") = py::none(), py::arg("trial_id") = "synthetic",
          "One synthetic trial as (csv_text, label_json).");

    m.def("detect", [](const std::string& csv, const std::optional<std::string>& label, std::optional<double> threshold,
                       const std::string& config_json) {
        const auto cfg = parse_run_config(config_json);
        auto pipeline = cfg.pipeline;
        if (threshold) pipeline.detector.threshold_phi = *threshold;
        pipeline.detector.validate();
        const auto a = detector::analyze_trial(load(csv, label, cfg, "trial"), pipeline);
        auto row = detector::classify_and_delay(a.phi_trace(), a.cycles, a.truth, pipeline.detector.threshold_phi,
                                                pipeline.detector.tp_window_cycles);
        row.trial_id = a.trial_id;
        py::dict out;
        out["phi"] = a.phi_trace();
        out["detection_sample"] = a.detection_sample;
        out["heel_strikes"] = a.heel_strikes;
        out["row"] = row_dict(row);
        return out;
    }, py::arg("csv_text"), py::arg("label_json") = py::none(), py::arg("threshold") = py::none(),
          py::arg("config_json") = "{}", "Kinematic detector over one trial.");

    m.def("baseline", [](const std::string& csv, const std::optional<std::string>& label, const std::string& config_json) {
        const auto cfg = parse_run_config(config_json);
        const auto r = baseline::evaluate_trial(load(csv, label, cfg, "trial"), cfg.wbam);
        py::list rows;
        for (const auto& row : r.rows) rows.append(row_dict(row));
        return rows;
    }, py::arg("csv_text"), py::arg("label_json") = py::none(), py::arg("config_json") = "{}",
          "WBAM threshold baseline over one trial.");

    m.def("sweep", [](const std::vector<std::string>& csvs, const std::vector<std::optional<std::string>>& labels,
                      const std::string& config_json) {
        const auto cfg = parse_run_config(config_json);
        const auto trials = trial_set(csvs, labels, cfg);
        const auto result = optimize::sweep(trials, cfg.pipeline, cfg.sweep);
        py::list points;
        for (const auto& p : result.points) {
            py::dict d;
            d["threshold"] = p.threshold;
            d["accuracy"] = p.accuracy;
            d["fp"] = p.fp;
            d["fn"] = p.fn;
            d["tp"] = p.tp;
            d["tn"] = p.tn;
            d["mean_delay_pct"] = p.mean_delay_pct;
            points.append(d);
        }
        py::dict out;
        out["points"] = points;
        out["selected"] = result.chosen_threshold();
        return out;
    }, py::arg("csv_texts") = std::vector<std::string>{}, py::arg("label_jsons") = std::vector<std::optional<std::string>>{},
          py::arg("config_json") = "{}",
          "Threshold sweep; with no trials the synthetic matrix from the config is used.");

    m.def("evaluate", [](const std::vector<std::string>& csvs, const std::vector<std::optional<std::string>>& labels,
                         const std::string& detector_name, std::optional<double> threshold, const std::string& config_json) {
        const auto cfg = parse_run_config(config_json);
        const auto trials = trial_set(csvs, labels, cfg);
        std::vector<detector::TrialRow> rows;
        if (detector_name == "kinematic") {
            auto pipeline = cfg.pipeline;
            if (threshold) pipeline.detector.threshold_phi = *threshold;
            const auto traces = optimize::compute_traces(trials, pipeline);
            rows = optimize::classify_all(traces, pipeline.detector.threshold_phi, pipeline.detector.tp_window_cycles);
        } else if (detector_name == "wbam") {
            for (const auto& t : trials) {
                const auto r = baseline::evaluate_trial(t, cfg.wbam).rows;
                rows.insert(rows.end(), r.begin(), r.end());
            }
        } else {
            throw Error(ErrorCode::InvalidConfig, "detector must be kinematic or wbam");
        }
        return analysis::report_to_json(analysis::evaluate(std::move(rows), detector_name));
    }, py::arg("csv_texts") = std::vector<std::string>{}, py::arg("label_jsons") = std::vector<std::optional<std::string>>{},
          py::arg("detector") = "kinematic", py::arg("threshold") = py::none(), py::arg("config_json") = "{}",
          "Evaluation report as JSON text.");

    m.def("pca", [](const std::vector<std::vector<double>>& rows, std::size_t k, bool standardize) {
        const std::size_t cols = rows.empty() ? 0 : rows.front().size();
        analysis::Matrix data(rows.size(), cols);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != cols) throw Error(ErrorCode::InvalidConfig, "ragged PCA input");
            for (std::size_t c = 0; c < cols; ++c) data(r, c) = rows[r][c];
        }
        const auto p = analysis::pca(data, k, standardize);
        std::vector<std::vector<double>> components(p.components.rows(), std::vector<double>(p.components.cols()));
        for (std::size_t i = 0; i < p.components.rows(); ++i) {
            for (std::size_t c = 0; c < p.components.cols(); ++c) components[i][c] = p.components(i, c);
        }
        py::dict out;
        out["components"] = components;
        out["explained_variance"] = p.explained_variance;
        out["explained_ratio"] = p.explained_ratio();
        out["dropped"] = p.dropped;
        return out;
    }, py::arg("rows"), py::arg("k") = 3, py::arg("standardize") = true);
}
