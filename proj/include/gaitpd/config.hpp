#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "gaitpd/baseline_wbam.hpp"
#include "gaitpd/detector.hpp"
#include "gaitpd/optimize.hpp"
#include "gaitpd/synth.hpp"

namespace gaitpd {

struct PcaOptions {
    std::size_t k = 3;
    bool standardize = true;
};

struct Paths {
    std::optional<std::string> input;
    std::optional<std::string> label;
    std::optional<std::string> output;
    std::optional<std::string> trial_dir;
};

/// Everything a CLI run needs. Loaded from JSON; every key is optional and
/// unknown keys are rejected.
struct RunConfig {
    detector::PipelineConfig pipeline;
    synth::GaitModelParams gait_model;
    std::optional<synth::PerturbationSpec> perturbation;
    synth::MatrixSpec matrix = synth::benchmark_matrix();
    optimize::SweepRange sweep;
    baseline::BaselineConfig wbam;
    PcaOptions pca;
    Paths paths;
    std::optional<double> sample_rate;  // of input CSVs; inferred from `t` when unset
};

RunConfig parse_run_config(std::string_view json_text);
/// The defaults (and any overrides) as a JSON document accepted by parse_run_config.
std::string run_config_to_json(const RunConfig& config);

}  // namespace gaitpd
