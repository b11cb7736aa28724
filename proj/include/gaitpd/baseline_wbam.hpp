#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gaitpd/detector.hpp"
#include "gaitpd/gait.hpp"
#include "gaitpd/ingest.hpp"

namespace gaitpd::baseline {

struct ChannelBand {
    double mean = 0.0;
    double sd = 0.0;
};

struct WbamBand {
    ChannelBand sagittal;
    ChannelBand frontal;
    std::size_t history_cycles = 3;
    double k = 4.0;
};

/// Mean and population sd over the concatenated samples of the last n_cycles
/// cycles that end at or before `before_sample`.
ChannelBand fit_channel(std::span<const double> wbam, std::span<const gait::GaitCycle> cycles,
                        std::size_t n_cycles, std::size_t before_sample);

WbamBand fit_band(std::span<const double> sagittal, std::span<const double> frontal,
                  std::span<const gait::GaitCycle> cycles, std::size_t n_cycles, std::size_t before_sample,
                  double k = 4.0);

/// True when `value` lies outside [mean - k sd, mean + k sd]. A zero-width
/// band fires on any deviation.
bool outside(double value, const ChannelBand& band, double k) noexcept;

/// First sample >= from_sample where the channel leaves its band.
std::optional<std::size_t> detect_channel(std::span<const double> wbam, const ChannelBand& band, double k,
                                          std::size_t from_sample);

/// First sample >= from_sample where either channel leaves its band.
std::optional<std::size_t> detect_wbam(std::span<const double> sagittal, std::span<const double> frontal,
                                       const WbamBand& band, std::size_t from_sample);

enum class CombineMode { either_plane, per_plane_average };

struct BaselineConfig {
    std::size_t history_cycles = 3;  // 3..5
    double k = 4.0;
    CombineMode mode = CombineMode::either_plane;
    double tp_window_cycles = 1.5;
    // Reference cycle at which unperturbed trials start being evaluated, so
    // that they are scored over the same stretch as perturbed ones.
    std::size_t reference_cycle = 10;
    gait::HeelStrikeOptions heel_strike;
    gait::PlausibilityBand plausibility;

    void validate() const;
};

struct BaselineResult {
    std::vector<detector::TrialRow> rows;  // one per plane in per-plane mode, else one
    WbamBand band;
};

/// Fits the band on the history before the onset cycle (or before the
/// reference cycle when unperturbed) and classifies with the same cycle
/// units as the kinematic detector.
BaselineResult evaluate_trial(const ingest::TrialRecording& trial, const BaselineConfig& config = {});

}  // namespace gaitpd::baseline
