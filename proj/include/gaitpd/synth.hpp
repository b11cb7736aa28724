#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gaitpd/ingest.hpp"
#include "gaitpd/types.hpp"

namespace gaitpd::synth {

struct GaitModelParams {
    double walking_speed = 1.25;  // m/s, treadmill belt speed
    double stride_duration = 1.0; // s
    double sample_rate = 100.0;   // Hz
    double step_width = 0.2;      // m
    double noise_sd = 0.003;      // m, white noise on every marker coordinate; 0 gives the bare template
    std::uint64_t seed = 1;
    double duration_s = 30.0;
    // Strides consumed by detector calibration; perturbations must start after them.
    std::size_t calibration_cycles = 10;

    void validate() const;
};

struct PerturbationSpec {
    PerturbationKind kind = PerturbationKind::trip;
    double onset_phase = 20.0;    // percent of the right gait cycle
    std::size_t onset_stride = 14;
    double magnitude = 3.0;       // m/s^2 for belt kinds, m for translation
    double duration_s = 0.5;
    Direction direction = Direction::N;  // translation only

    void validate(const GaitModelParams& params) const;
};

/// Right-belt surface velocity change (m/s, lab x axis) tau seconds after
/// onset: constant acceleration for duration_s, then a 0.5 m/s^2 return to
/// the nominal speed. A trip slows the backward-running belt (positive
/// change), a slip speeds it up (negative). Zero for translation.
double belt_velocity_change(const PerturbationSpec& spec, double tau);

/// First sample at or after the perturbation onset.
std::size_t onset_sample(const GaitModelParams& params, const PerturbationSpec& spec);

/// Deterministic labelled trial. The perturbation label is stored in the
/// returned recording; WBAM channels are always generated.
ingest::TrialRecording generate_trial(const GaitModelParams& params, const std::optional<PerturbationSpec>& spec,
                                      std::string trial_id = "synthetic");

/// One row of the trial matrix: a kind crossed with its magnitudes and onset phases.
struct KindAxis {
    PerturbationKind kind = PerturbationKind::trip;
    std::vector<double> magnitudes;
    std::vector<double> onset_phases;
};

struct MatrixSpec {
    std::vector<KindAxis> rows;
    std::size_t onset_stride = 14;
    double duration_s = 0.5;          // perturbation duration
    std::size_t controls_per_row = 1; // unperturbed trials per row
};

/// Cartesian product of each row's magnitudes and phases plus the control
/// trials, every trial with its own seed derived from base.seed. Translation
/// cells cycle through the eight directions. Output is sorted by trial_id.
std::vector<ingest::TrialRecording> generate_matrix(const GaitModelParams& base, const MatrixSpec& spec);

/// The benchmark set: trip, slip and translation at three magnitude levels and
/// four onset phases each, plus four controls per kind (48 trials).
MatrixSpec benchmark_matrix();

}  // namespace gaitpd::synth
