#include "gaitpd/gait.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gaitpd::gait {

std::optional<std::size_t> Segmentation::cycle_of(std::size_t sample) const {
    const auto it = std::upper_bound(cycles.begin(), cycles.end(), sample,
                                     [](std::size_t s, const GaitCycle& c) { return s < c.start; });
    if (it == cycles.begin()) return std::nullopt;
    const auto i = static_cast<std::size_t>(std::distance(cycles.begin(), it)) - 1;
    if (!cycles[i].contains(sample)) return std::nullopt;
    return i;
}

std::vector<std::size_t> detect_heel_strikes(std::span<const double> grf_z, double sample_rate,
                                             const HeelStrikeOptions& options) {
    if (!(options.threshold_n > 0.0)) throw Error(ErrorCode::InvalidConfig, "GRF threshold must be positive");
    if (!(sample_rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "sample_rate must be positive");
    std::vector<std::size_t> events;
    std::optional<std::size_t> last;
    for (std::size_t i = 1; i < grf_z.size(); ++i) {
        if (grf_z[i - 1] < options.threshold_n && grf_z[i] >= options.threshold_n) {
            if (last && static_cast<double>(i - *last) / sample_rate < options.refractory_s) continue;
            events.push_back(i);
            last = i;
        }
    }
    return events;
}

Segmentation segment_and_phase(std::span<const std::size_t> events, std::size_t n_frames, double sample_rate,
                               const PlausibilityBand& band) {
    if (events.size() < 2) throw Error(ErrorCode::InsufficientEvents, "need at least two heel strikes");
    if (!(sample_rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "sample_rate must be positive");
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i] >= n_frames || (i > 0 && events[i] <= events[i - 1])) {
            throw Error(ErrorCode::OutOfRange, "heel strike events must be increasing and inside the trial");
        }
    }
    Segmentation seg;
    seg.phase.assign(n_frames, std::nullopt);
    seg.boundary.assign(n_frames, false);
    for (std::size_t e : events) seg.boundary[e] = true;
    for (std::size_t i = 0; i + 1 < events.size(); ++i) {
        GaitCycle c;
        c.start = events[i];
        c.end = events[i + 1];
        c.duration_s = static_cast<double>(c.length()) / sample_rate;
        c.plausible = c.duration_s >= band.min_s && c.duration_s <= band.max_s;
        const double len = static_cast<double>(c.length());
        for (std::size_t s = c.start; s < c.end; ++s) {
            seg.phase[s] = 100.0 * static_cast<double>(s - c.start) / len;
        }
        seg.cycles.push_back(c);
    }
    return seg;
}

CycleMatrix resample_cycle(std::span<const StateVector> states, const GaitCycle& cycle, std::size_t bins) {
    if (bins < 2) throw Error(ErrorCode::InvalidConfig, "bins must be at least 2");
    if (cycle.end <= cycle.start || cycle.end >= states.size()) {
        throw Error(ErrorCode::OutOfRange, "cycle [" + std::to_string(cycle.start) + ", " +
                                               std::to_string(cycle.end) + "] outside the state sequence");
    }
    const double len = static_cast<double>(cycle.length());
    CycleMatrix out(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        // Offsets are taken relative to the cycle start so that the result does
        // not depend on where the cycle sits in the trial.
        const double offset = static_cast<double>(k) * len / static_cast<double>(bins);
        const double whole = std::floor(offset);
        const double frac = offset - whole;
        const std::size_t i0 = cycle.start + static_cast<std::size_t>(whole);
        const StateVector& a = states[i0];
        if (frac == 0.0) {
            out[k] = a;
            continue;
        }
        const StateVector& b = states[i0 + 1];
        for (std::size_t s = 0; s < kNumStates; ++s) out[k][s] = a[s] + frac * (b[s] - a[s]);
    }
    return out;
}

}  // namespace gaitpd::gait
