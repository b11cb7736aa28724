#pragma once

#include <array>
#include <span>
#include <vector>

#include "gaitpd/ingest.hpp"
#include "gaitpd/types.hpp"

namespace gaitpd::kinematics {

/// Global: velocities of the global heel and COM positions.
/// Relative: velocities of the relative position states (sensitivity checks).
enum class VelocityFrame { global, relative };

struct Options {
    int smooth_window = 5;  // odd; 1 disables smoothing
    VelocityFrame velocity_frame = VelocityFrame::global;
};

/// Mean of the four pelvic markers. Throws MissingMarker if any is missing.
Vec3 compute_com(const ingest::MarkerFrame& frame);

/// The eight position states in canonical order: right heel minus COM,
/// left heel minus COM, then the horizontal COM offset from the heel midpoint.
std::array<double, kNumPositionStates> relative_states(const ingest::MarkerFrame& frame, const Vec3& com);

/// Centred moving average; near the ends the window shrinks symmetrically.
/// Width must be odd.
std::vector<double> smooth(std::span<const double> series, int window);

/// Central difference in the interior, one-sided at the ends, applied after
/// smoothing the positions with `smooth_window`.
std::vector<double> differentiate(std::span<const double> series, double sample_rate, int smooth_window = 1);

std::vector<StateVector> build_state_sequence(const ingest::TrialRecording& trial, const Options& options = {});

}  // namespace gaitpd::kinematics
