#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gaitpd/types.hpp"

namespace gaitpd::ingest {

enum class Marker : std::size_t { rasis, lasis, rpsis, lpsis, rheel, lheel, rtoe, ltoe };

inline constexpr std::size_t kNumMarkers = 8;
inline constexpr std::array<std::string_view, kNumMarkers> kMarkerNames = {
    "rasis", "lasis", "rpsis", "lpsis", "rheel", "lheel", "rtoe", "ltoe"};

/// Eight marker positions in meters. x anteroposterior (+forward),
/// y mediolateral (+left), z vertical (+up). Any coordinate may be kMissing.
struct MarkerFrame {
    std::array<Vec3, kNumMarkers> markers{};

    Vec3& operator[](Marker m) { return markers[static_cast<std::size_t>(m)]; }
    const Vec3& operator[](Marker m) const { return markers[static_cast<std::size_t>(m)]; }
};

struct TrialRecording {
    std::string trial_id;
    double sample_rate = 100.0;
    std::vector<MarkerFrame> frames;
    std::vector<double> grf_right_z;
    std::vector<double> grf_left_z;
    // Present together or not at all.
    std::optional<std::vector<double>> wbam_sagittal;
    std::optional<std::vector<double>> wbam_frontal;
    std::optional<PerturbationLabel> perturbation;

    std::size_t size() const noexcept { return frames.size(); }
    bool has_wbam() const noexcept { return wbam_sagittal.has_value() && wbam_frontal.has_value(); }

    /// Checks the structural invariants; throws Error on violation.
    void validate() const;
};

/// Column names of the trial CSV, in canonical order.
std::vector<std::string> csv_header(bool with_wbam);

/// Parses a trial CSV. The `t` column is checked against sample_rate.
TrialRecording parse_trial(std::string_view csv_text, double sample_rate, std::string trial_id = "trial");

/// Writes the CSV format read by parse_trial, 9 significant digits per value.
std::string serialize_trial(const TrialRecording& trial);

/// Sample rate implied by the first two `t` cells of a trial CSV.
double infer_sample_rate(std::string_view csv_text);

std::string label_to_json(const std::optional<PerturbationLabel>& label);
std::optional<PerturbationLabel> label_from_json(std::string_view json_text);

struct Gap {
    std::size_t first = 0;  // first missing sample
    std::size_t length = 0;

    friend bool operator==(const Gap&, const Gap&) = default;
};

struct FillResult {
    std::vector<double> series;
    std::vector<Gap> oversized;  // gaps left untouched because they exceed max_gap
};

inline constexpr std::size_t kDefaultMaxGap = 25;

/// Interpolates interior gaps of at most max_gap samples. Uses the cubic
/// through the two known samples on either side of the gap when both pairs
/// exist, else the line through the immediate neighbours. Only samples that
/// were known in the input are used as support, so the result is idempotent.
FillResult fill_gaps(std::span<const double> series, std::size_t max_gap = kDefaultMaxGap);

struct RepairReport {
    struct Entry {
        std::string channel;
        Gap gap;
    };
    std::vector<Entry> oversized;
    std::size_t filled_samples = 0;
};

/// Gap-fills every pelvis and heel coordinate channel in place. Toe channels
/// are left as recorded.
RepairReport repair_trial(TrialRecording& trial, std::size_t max_gap = kDefaultMaxGap);

std::vector<double> marker_channel(const TrialRecording& trial, Marker m, std::size_t axis);
void set_marker_channel(TrialRecording& trial, Marker m, std::size_t axis, std::span<const double> values);

}  // namespace gaitpd::ingest
