#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gaitpd/types.hpp"

namespace gaitpd::gait {

struct HeelStrikeOptions {
    double threshold_n = 20.0;
    double refractory_s = 0.4;
};

/// Cycle durations outside this band are kept for classification but never
/// enter the steady-state statistics.
struct PlausibilityBand {
    double min_s = 0.4;
    double max_s = 2.5;
};

/// Right heel strike to the next right heel strike; `end` is the sample of the
/// next strike, so the cycle covers samples [start, end).
struct GaitCycle {
    std::size_t start = 0;
    std::size_t end = 0;
    double duration_s = 0.0;
    bool plausible = true;

    std::size_t length() const noexcept { return end - start; }
    bool contains(std::size_t sample) const noexcept { return sample >= start && sample < end; }
};

struct Segmentation {
    std::vector<GaitCycle> cycles;
    // Percent of the cycle in [0, 100); nullopt before the first and from the
    // last heel strike on.
    std::vector<std::optional<double>> phase;
    // True on every heel strike sample.
    std::vector<bool> boundary;

    /// Index of the cycle holding `sample`, if any.
    std::optional<std::size_t> cycle_of(std::size_t sample) const;
};

/// Upward crossings of threshold_n, with crossings closer than refractory_s to
/// the previously accepted event suppressed.
std::vector<std::size_t> detect_heel_strikes(std::span<const double> grf_z, double sample_rate,
                                             const HeelStrikeOptions& options = {});

Segmentation segment_and_phase(std::span<const std::size_t> events, std::size_t n_frames, double sample_rate,
                               const PlausibilityBand& band = {});

/// Linear interpolation of every state at phases k*100/bins, k = 0..bins-1.
/// Needs states up to and including cycle.end.
CycleMatrix resample_cycle(std::span<const StateVector> states, const GaitCycle& cycle, std::size_t bins);

}  // namespace gaitpd::gait
