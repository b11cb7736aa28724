#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gaitpd/gait.hpp"
#include "gaitpd/ingest.hpp"
#include "gaitpd/kinematics.hpp"
#include "gaitpd/stats.hpp"
#include "gaitpd/types.hpp"

namespace gaitpd::detector {

inline constexpr double kDefaultThreshold = 0.125;

struct DetectorConfig {
    double threshold_phi = kDefaultThreshold;
    double band_k = 2.0;
    std::size_t window_cycles = 10;
    double epsilon = stats::kDefaultEpsilon;
    std::size_t bins = 100;
    // A true perturbation counts as detected when the first crossing lands
    // within this many onset-cycle durations after the onset.
    double tp_window_cycles = 1.5;
    // Cycles whose peak phi reaches this value are kept out of the rolling
    // window. Unset means "same as threshold_phi". Sweeps pin it so that the
    // phi trace does not depend on the detection threshold.
    std::optional<double> exclusion_phi;
    gait::PlausibilityBand plausibility;

    void validate() const;
    double exclusion_threshold() const noexcept { return exclusion_phi.value_or(threshold_phi); }
};

struct Alpha {
    double magnitude = 0.0;  // distance beyond the band edge, >= 0
    int sign = 0;            // side of the mean; 0 inside the band

    double signed_value() const noexcept { return sign * magnitude; }
    friend bool operator==(const Alpha&, const Alpha&) = default;
};

/// Exceedance of x beyond mean +/- band_k * sd.
Alpha alpha(double x, double mean, double sd, double band_k);

/// Mean over states of alpha / (2 C + alpha). A 0/0 term counts as 0.
double phi(std::span<const double> alphas, std::span<const double> covs);

enum class SampleStatus { skipped, calibrating, evaluated };

struct Sample {
    std::size_t index = 0;
    std::optional<double> phase;
    SampleStatus status = SampleStatus::skipped;
    std::optional<double> phi;
    StateVector alpha{};    // signed exceedances; zero unless evaluated
    bool detected = false;  // latched from the first crossing on
};

struct CycleRecord {
    std::size_t start = 0;
    std::size_t end = 0;
    bool calibrating = false;  // the band model was not yet valid at start
    bool plausible = true;
    double max_phi = 0.0;      // peak over evaluated samples
    bool crossed = false;      // max_phi >= threshold_phi
    bool pushed = false;       // entered the rolling window

    std::size_t length() const noexcept { return end - start; }
    bool contains(std::size_t s) const noexcept { return s >= start && s < end; }
};

/// Streaming detector. Frames must be fed strictly in order; a session
/// belongs to one thread at a time.
class Session {
public:
    Session(DetectorConfig config, double sample_rate);

    /// `phase` is the gait phase in percent (nullopt outside the segmented
    /// region); `cycle_boundary` marks a right heel strike.
    Sample step(const StateVector& state, std::optional<double> phase, bool cycle_boundary);

    const DetectorConfig& config() const noexcept { return config_; }
    const stats::PhaseBandModel& model() const noexcept { return model_; }
    const std::vector<CycleRecord>& cycles() const noexcept { return cycles_; }
    std::optional<std::size_t> detection_sample() const noexcept { return detection_sample_; }
    std::size_t skipped() const noexcept { return skipped_; }
    std::size_t samples_seen() const noexcept { return next_index_; }

private:
    void close_cycle(const StateVector& end_state);

    DetectorConfig config_;
    double sample_rate_;
    double exclusion_;
    stats::PhaseBandModel model_;
    std::vector<CycleRecord> cycles_;
    std::vector<StateVector> buffer_;
    CycleRecord current_;
    bool open_ = false;
    bool skip_next_push_ = false;
    std::optional<std::size_t> detection_sample_;
    std::size_t skipped_ = 0;
    std::size_t next_index_ = 0;
};

/// Nearest phase bin, wrapping 100% onto bin 0.
std::size_t phase_bin(double phase, std::size_t bins) noexcept;

struct PhiTrace {
    std::vector<std::optional<double>> phi;  // nullopt when not evaluated
    std::vector<CycleRecord> cycles;
};

/// Whole-trial computation: resample every cycle up front, then walk the
/// cycles rebuilding the band from the window list. Independent of Session;
/// the two must agree bit for bit.
PhiTrace detect_batch(std::span<const StateVector> states, const gait::Segmentation& segmentation,
                      const DetectorConfig& config, double sample_rate);

struct PipelineConfig {
    kinematics::Options kinematics;
    gait::HeelStrikeOptions heel_strike;
    std::size_t max_gap = ingest::kDefaultMaxGap;
    DetectorConfig detector;
};

struct TrialAnalysis {
    std::string trial_id;
    double sample_rate = 0.0;
    std::optional<PerturbationLabel> truth;
    ingest::RepairReport repair;
    std::vector<StateVector> states;
    std::vector<std::size_t> heel_strikes;
    gait::Segmentation segmentation;
    std::vector<Sample> samples;
    std::vector<CycleRecord> cycles;
    std::optional<std::size_t> detection_sample;
    std::size_t skipped = 0;

    std::vector<std::optional<double>> phi_trace() const;
};

/// Gap fill, states, heel strikes, phase, then the streaming session.
TrialAnalysis analyze_trial(ingest::TrialRecording trial, const PipelineConfig& config = {});

/// Per-trial classification. Units are gait cycles: every evaluated cycle
/// that ends before the onset cycle is a TN or FP; the onset cycle together
/// with the rest of the detection window forms one TP or FN unit; cycles after
/// that window are not counted.
struct TrialRow {
    std::string trial_id;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
    std::optional<double> delay_pct;
    std::optional<std::size_t> detection_sample;
    std::optional<std::size_t> onset_sample;

    std::size_t total() const noexcept { return tp + fp + tn + fn; }
    friend bool operator==(const TrialRow&, const TrialRow&) = default;
};

TrialRow classify_and_delay(std::span<const std::optional<double>> phi, std::span<const CycleRecord> cycles,
                            const std::optional<PerturbationLabel>& truth, double threshold,
                            double tp_window_cycles = 1.5);

/// One JSON line: {"i":..,"phase":..,"phi":..,"alpha":[..],"detected":..}.
std::string to_json_line(const Sample& sample);

}  // namespace gaitpd::detector
