#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gaitpd/detector.hpp"
#include "gaitpd/ingest.hpp"

namespace gaitpd::optimize {

struct SweepRange {
    double t_min = 0.01;
    double t_max = 1.0;
    double step = 0.001;

    void validate() const;
    /// t_min + k * step for every k that stays within t_max.
    std::vector<double> thresholds() const;
};

struct SweepPoint {
    double threshold = 0.0;
    double accuracy = 0.0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::optional<double> mean_delay_pct;

    std::size_t errors() const noexcept { return fp + fn; }
    friend bool operator==(const SweepPoint&, const SweepPoint&) = default;
};

struct SweepResult {
    std::vector<SweepPoint> points;  // ascending threshold
    std::size_t chosen = 0;

    double chosen_threshold() const { return points.at(chosen).threshold; }
    friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

/// The threshold-independent part of a detector run.
struct TrialTrace {
    std::string trial_id;
    std::vector<std::optional<double>> phi;
    std::vector<detector::CycleRecord> cycles;
    std::optional<PerturbationLabel> truth;
};

TrialTrace trace_trial(const ingest::TrialRecording& trial, const detector::PipelineConfig& config);

/// Traces for every trial, computed in parallel, returned sorted by trial_id.
std::vector<TrialTrace> compute_traces(std::span<const ingest::TrialRecording> trials,
                                       const detector::PipelineConfig& config, std::size_t threads = 0);

std::vector<detector::TrialRow> classify_all(std::span<const TrialTrace> traces, double threshold,
                                             double tp_window_cycles);

SweepPoint evaluate_threshold(std::span<const TrialTrace> traces, double threshold, double tp_window_cycles);

/// Thresholds the cached traces repeatedly.
SweepResult sweep_traces(std::span<const TrialTrace> traces, const SweepRange& range, double tp_window_cycles);

/// Computes traces once, then sweeps them.
SweepResult sweep(std::span<const ingest::TrialRecording> trials, const detector::PipelineConfig& config,
                  const SweepRange& range, std::size_t threads = 0);

/// Re-runs the full detector for every threshold. Slow; exists to check sweep().
SweepResult sweep_uncached(std::span<const ingest::TrialRecording> trials, const detector::PipelineConfig& config,
                           const SweepRange& range);

/// Index minimising FP + FN, ties to the smaller mean delay (no TPs counts as
/// worst), then to the smaller threshold.
std::size_t select_index(std::span<const SweepPoint> points);
double select_threshold(const SweepResult& result);

/// CSV: threshold,accuracy,fp,fn,tp,tn,mean_delay_pct
void write_sweep_csv(std::ostream& out, const SweepResult& result);

/// Worker count from GAITPD_THREADS, else the hardware concurrency.
std::size_t default_threads();

}  // namespace gaitpd::optimize
