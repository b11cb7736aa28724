#include "gaitpd/kinematics.hpp"

#include <algorithm>
#include <string>

namespace gaitpd::kinematics {

using ingest::Marker;
using ingest::MarkerFrame;

namespace {

void require_present(const Vec3& p, Marker m) {
    if (is_missing(p.x) || is_missing(p.y) || is_missing(p.z)) {
        throw Error(ErrorCode::MissingMarker,
                    std::string(ingest::kMarkerNames[static_cast<std::size_t>(m)]) + " is missing");
    }
}

}  // namespace

Vec3 compute_com(const MarkerFrame& frame) {
    constexpr std::array<Marker, 4> pelvis = {Marker::rasis, Marker::lasis, Marker::rpsis, Marker::lpsis};
    Vec3 sum;
    for (Marker m : pelvis) {
        require_present(frame[m], m);
        sum = sum + frame[m];
    }
    return 0.25 * sum;
}

std::array<double, kNumPositionStates> relative_states(const MarkerFrame& frame, const Vec3& com) {
    const Vec3& r = frame[Marker::rheel];
    const Vec3& l = frame[Marker::lheel];
    require_present(r, Marker::rheel);
    require_present(l, Marker::lheel);
    const Vec3 dr = r - com;
    const Vec3 dl = l - com;
    const double mid_x = 0.5 * (r.x + l.x);
    const double mid_y = 0.5 * (r.y + l.y);
    return {dr.x, dr.y, dr.z, dl.x, dl.y, dl.z, com.x - mid_x, com.y - mid_y};
}

std::vector<double> smooth(std::span<const double> series, int window) {
    if (window < 1 || window % 2 == 0) {
        throw Error(ErrorCode::InvalidConfig, "smooth_window must be a positive odd count");
    }
    std::vector<double> out(series.begin(), series.end());
    if (window == 1) return out;
    const auto n = static_cast<std::ptrdiff_t>(series.size());
    const std::ptrdiff_t half = window / 2;
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        // Near the ends the window shrinks symmetrically so it stays centred.
        const std::ptrdiff_t h = std::min({half, i, n - 1 - i});
        const std::ptrdiff_t lo = i - h;
        const std::ptrdiff_t hi = i + h;
        // Averaging offsets from the centre keeps constant stretches exact.
        const double centre = series[static_cast<std::size_t>(i)];
        double sum = 0.0;
        for (std::ptrdiff_t j = lo; j <= hi; ++j) sum += series[static_cast<std::size_t>(j)] - centre;
        out[static_cast<std::size_t>(i)] = centre + sum / static_cast<double>(hi - lo + 1);
    }
    return out;
}

std::vector<double> differentiate(std::span<const double> series, double sample_rate, int smooth_window) {
    if (series.size() < 3) throw Error(ErrorCode::TooShort, "differentiation needs at least 3 samples");
    if (!(sample_rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "sample_rate must be positive");
    const auto x = smooth(series, smooth_window);
    const std::size_t n = x.size();
    std::vector<double> v(n);
    v.front() = (x[1] - x[0]) * sample_rate;
    v.back() = (x[n - 1] - x[n - 2]) * sample_rate;
    const double half_rate = 0.5 * sample_rate;
    for (std::size_t i = 1; i + 1 < n; ++i) v[i] = (x[i + 1] - x[i - 1]) * half_rate;
    return v;
}

std::vector<StateVector> build_state_sequence(const ingest::TrialRecording& trial, const Options& options) {
    trial.validate();
    const std::size_t n = trial.size();
    if (n < 3) throw Error(ErrorCode::TooShort, "state sequence needs at least 3 frames");

    std::vector<StateVector> states(n);
    // Series to differentiate, in velocity-state order: rheel xyz, lheel xyz, com xy.
    std::array<std::vector<double>, 8> motion;
    for (auto& m : motion) m.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        const auto& frame = trial.frames[i];
        const Vec3 com = compute_com(frame);
        const auto rel = relative_states(frame, com);
        for (std::size_t s = 0; s < kNumPositionStates; ++s) states[i][s] = rel[s];

        if (options.velocity_frame == VelocityFrame::global) {
            const Vec3& r = frame[Marker::rheel];
            const Vec3& l = frame[Marker::lheel];
            motion[0][i] = r.x;
            motion[1][i] = r.y;
            motion[2][i] = r.z;
            motion[3][i] = l.x;
            motion[4][i] = l.y;
            motion[5][i] = l.z;
            motion[6][i] = com.x;
            motion[7][i] = com.y;
        } else {
            for (std::size_t s = 0; s < kNumPositionStates; ++s) motion[s][i] = rel[s];
        }
    }

    for (std::size_t s = 0; s < motion.size(); ++s) {
        const auto v = differentiate(motion[s], trial.sample_rate, options.smooth_window);
        for (std::size_t i = 0; i < n; ++i) states[i][kNumPositionStates + s] = v[i];
    }
    return states;
}

}  // namespace gaitpd::kinematics
