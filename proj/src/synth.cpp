#include "gaitpd/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace gaitpd::synth {

using ingest::Marker;

namespace {

// Template geometry (treadmill frame, origin under the mean pelvis position).
constexpr double kStanceFraction = 0.6;
constexpr double kHeelHeight = 0.05;
constexpr double kSwingLift = 0.12;
constexpr double kPelvisHeight = 0.95;
constexpr double kPelvisBobAp = 0.015;
constexpr double kPelvisBobVertical = 0.015;
constexpr double kPelvisSway = 0.025;
constexpr double kBodyWeight = 700.0;  // N
constexpr double kGrfRise = 0.05;      // fraction of the cycle
constexpr double kGrfLead = 0.01;
constexpr double kToeOffset = 0.15;
constexpr double kBeltReturn = 0.5;  // m/s^2

// Pelvis marker offsets from the COM; they average to zero.
constexpr std::array<Vec3, 4> kPelvisOffsets = {
    Vec3{0.10, -0.12, 0.02}, Vec3{0.10, 0.12, 0.02}, Vec3{-0.10, -0.06, -0.02}, Vec3{-0.10, 0.06, -0.02}};

// Whole-body response to a disturbance.
constexpr double kComFollow = 0.7;       // share of the belt velocity change the COM picks up
constexpr double kComDrop = 0.5;         // COM lowering per meter of foot-body displacement
constexpr double kComLag = 0.08;         // s, lag of the COM behind a belt-driven foot
constexpr double kComRecovery = 0.5;     // s, decay of the COM velocity carried past toe-off
constexpr double kComReturn = 1.0;       // s, return of the displaced COM to its steady path
constexpr double kPlatformLag = 0.4;    // s, lag of the COM behind a translated base of support
constexpr double kWbamNoise = 0.0015;
constexpr double kWbamGain = 0.05;       // WBAM per m/s of COM response velocity

double frac(double x) { return x - std::floor(x); }

double smoothstep(double u) {
    u = std::clamp(u, 0.0, 1.0);
    return u * u * (3.0 - 2.0 * u);
}

struct FootPose {
    double x;
    double z;
    bool stance;
    double swing_u;  // progress through swing, 0 in stance
};

FootPose foot_pose(double p, const GaitModelParams& g) {
    const double half_step = 0.5 * g.walking_speed * kStanceFraction * g.stride_duration;
    if (p < kStanceFraction) {
        return {half_step - g.walking_speed * g.stride_duration * p, kHeelHeight, true, 0.0};
    }
    // Cubic Hermite return with the belt velocity at both ends.
    const double u = (p - kStanceFraction) / (1.0 - kStanceFraction);
    const double m = -g.walking_speed * (1.0 - kStanceFraction) * g.stride_duration;
    const double u2 = u * u;
    const double u3 = u2 * u;
    const double x = (2 * u3 - 3 * u2 + 1) * -half_step + (u3 - 2 * u2 + u) * m + (-2 * u3 + 3 * u2) * half_step +
                     (u3 - u2) * m;
    const double s = std::sin(std::numbers::pi * u);
    return {x, kHeelHeight + kSwingLift * s * s, false, u};
}

double grf(double p) {
    if (p >= kStanceFraction) return 0.0;
    const double rise = 0.5 * (1.0 - std::cos(std::numbers::pi * std::min(1.0, (p + kGrfLead) / kGrfRise)));
    const double fall =
        0.5 * (1.0 - std::cos(std::numbers::pi * std::min(1.0, (kStanceFraction - p) / kGrfRise)));
    return kBodyWeight * rise * fall;
}

Vec3 pelvis_centre(double p) {
    const double two_pi = 2.0 * std::numbers::pi;
    return {kPelvisBobAp * std::sin(2.0 * two_pi * p), -kPelvisSway * std::sin(two_pi * p),
            kPelvisHeight + kPelvisBobVertical * std::cos(2.0 * two_pi * p)};
}

bool is_belt(PerturbationKind k) { return k == PerturbationKind::trip || k == PerturbationKind::slip; }

}  // namespace

void GaitModelParams::validate() const {
    if (!(walking_speed > 0.0) || !(stride_duration > 0.0) || !(sample_rate > 0.0) || !(step_width > 0.0) ||
        !(duration_s > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "gait model parameters must be positive");
    }
    if (!(noise_sd >= 0.0)) throw Error(ErrorCode::InvalidConfig, "noise_sd must be non-negative");
    if (duration_s * sample_rate < 3.0) throw Error(ErrorCode::TooShort, "trial shorter than 3 samples");
}

void PerturbationSpec::validate(const GaitModelParams& params) const {
    if (!(magnitude > 0.0)) throw Error(ErrorCode::InvalidSpec, "magnitude must be positive");
    if (!(duration_s > 0.0)) throw Error(ErrorCode::InvalidSpec, "duration must be positive");
    if (!(onset_phase >= 0.0 && onset_phase < 100.0)) {
        throw Error(ErrorCode::InvalidSpec, "onset_phase must lie in [0, 100)");
    }
    if (is_belt(kind) && onset_phase >= 100.0 * kStanceFraction) {
        throw Error(ErrorCode::InvalidSpec, "belt perturbations need right-foot stance (onset_phase < 60)");
    }
    if (onset_stride < params.calibration_cycles + 1) {
        throw Error(ErrorCode::InvalidSpec, "onset_stride must leave " + std::to_string(params.calibration_cycles) +
                                                " calibration cycles");
    }
    const double end = (static_cast<double>(onset_stride) + 3.0) * params.stride_duration;
    if (end > params.duration_s) throw Error(ErrorCode::InvalidSpec, "trial too short for the onset stride");
}

double belt_velocity_change(const PerturbationSpec& spec, double tau) {
    if (!is_belt(spec.kind) || tau <= 0.0) return 0.0;
    const double sign = spec.kind == PerturbationKind::trip ? 1.0 : -1.0;
    const double peak = spec.magnitude * spec.duration_s;
    if (tau <= spec.duration_s) return sign * spec.magnitude * tau;
    return sign * std::max(0.0, peak - kBeltReturn * (tau - spec.duration_s));
}

std::size_t onset_sample(const GaitModelParams& params, const PerturbationSpec& spec) {
    const double t0 = (static_cast<double>(spec.onset_stride) + spec.onset_phase / 100.0) * params.stride_duration;
    return static_cast<std::size_t>(std::ceil(t0 * params.sample_rate - 1e-9));
}

ingest::TrialRecording generate_trial(const GaitModelParams& params, const std::optional<PerturbationSpec>& spec,
                                      std::string trial_id) {
    params.validate();
    if (spec) spec->validate(params);

    const auto n = static_cast<std::size_t>(std::llround(params.duration_s * params.sample_rate));
    const double dt = 1.0 / params.sample_rate;
    const double samples_per_stride = params.sample_rate * params.stride_duration;
    const double half_width = 0.5 * params.step_width;

    ingest::TrialRecording trial;
    trial.trial_id = std::move(trial_id);
    trial.sample_rate = params.sample_rate;
    trial.frames.resize(n);
    trial.grf_right_z.resize(n);
    trial.grf_left_z.resize(n);
    trial.wbam_sagittal.emplace(n);
    trial.wbam_frontal.emplace(n);

    std::size_t onset = n;
    if (spec) {
        onset = onset_sample(params, *spec);
        PerturbationLabel label;
        label.onset_sample = onset;
        label.kind = spec->kind;
        label.magnitude = spec->magnitude;
        if (spec->kind == PerturbationKind::translation) label.direction = spec->direction;
        trial.perturbation = label;
    }

    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> unit(0.0, 1.0);

    // Perturbation state carried across samples.
    double foot_shift = 0.0;        // right heel x displacement from the belt
    double swing_start_shift = 0.0;
    double com_velocity_shift = 0.0;  // belt-induced COM velocity, kept after toe-off
    bool prev_stance = true;
    double prev_belt = 0.0;
    Vec3 platform;                  // translation of the base of support
    Vec3 com_follow;                // lagged COM response
    Vec3 prev_com_offset;

    for (std::size_t i = 0; i < n; ++i) {
        const double p = std::fmod(static_cast<double>(i), samples_per_stride) / samples_per_stride;
        const double pl = frac(p + 0.5);
        const FootPose right = foot_pose(p, params);
        const FootPose left = foot_pose(pl, params);
        const Vec3 centre = pelvis_centre(p);

        Vec3 right_heel{right.x, -half_width, right.z};
        Vec3 left_heel{left.x, half_width, left.z};
        Vec3 com_offset;

        if (spec && i >= onset) {
            const double tau = static_cast<double>(i - onset) * dt;
            if (is_belt(spec->kind)) {
                const double belt = belt_velocity_change(*spec, tau);
                if (right.stance) {
                    if (i > onset && prev_stance) foot_shift += 0.5 * (prev_belt + belt) * dt;
                    if (!prev_stance) foot_shift = 0.0;
                } else {
                    if (prev_stance) swing_start_shift = foot_shift;
                    foot_shift = swing_start_shift * (1.0 - smoothstep(right.swing_u));
                }
                prev_belt = belt;
                // The body picks up part of the belt's velocity while the foot
                // is on it and keeps it, decaying, once the foot leaves.
                if (right.stance) {
                    com_velocity_shift += dt / kComLag * (kComFollow * belt - com_velocity_shift);
                } else {
                    com_velocity_shift *= std::exp(-dt / kComRecovery);
                }
                com_follow.x += (com_velocity_shift - com_follow.x / kComReturn) * dt;
                right_heel.x += foot_shift;
                com_offset = {com_follow.x, 0.0, -kComDrop * std::abs(com_follow.x)};
            } else {
                const auto dir = direction_unit(spec->direction);
                const double s = spec->magnitude * smoothstep(tau / spec->duration_s);
                platform = {s * dir[0], s * dir[1], 0.0};
                com_follow = com_follow + (dt / kPlatformLag) * (platform - com_follow);
                const Vec3 lag = platform - com_follow;
                const double gap = std::hypot(lag.x, lag.y);
                right_heel = right_heel + platform;
                left_heel = left_heel + platform;
                com_offset = {com_follow.x, com_follow.y, -kComDrop * gap};
            }
        }
        prev_stance = right.stance;

        auto& frame = trial.frames[i];
        const Vec3 com = centre + com_offset;
        const std::array<Marker, 4> pelvis = {Marker::rasis, Marker::lasis, Marker::rpsis, Marker::lpsis};
        for (std::size_t k = 0; k < 4; ++k) frame[pelvis[k]] = com + kPelvisOffsets[k];
        frame[Marker::rheel] = right_heel;
        frame[Marker::lheel] = left_heel;
        frame[Marker::rtoe] = right_heel + Vec3{kToeOffset, 0.0, -0.02};
        frame[Marker::ltoe] = left_heel + Vec3{kToeOffset, 0.0, -0.02};
        for (auto& m : frame.markers) {
            for (std::size_t a = 0; a < 3; ++a) m[a] += params.noise_sd * unit(rng);
        }

        trial.grf_right_z[i] = grf(p);
        trial.grf_left_z[i] = grf(pl);

        const double two_pi = 2.0 * std::numbers::pi;
        const Vec3 com_velocity = params.sample_rate * (com_offset - prev_com_offset);
        prev_com_offset = com_offset;
        (*trial.wbam_sagittal)[i] = 0.01 * std::sin(two_pi * p) + 0.004 * std::sin(2.0 * two_pi * p + 0.5) +
                                    kWbamGain * com_velocity.x + kWbamNoise * unit(rng);
        (*trial.wbam_frontal)[i] =
            0.006 * std::sin(two_pi * p + 1.0) + kWbamGain * com_velocity.y + kWbamNoise * unit(rng);
    }
    return trial;
}

std::vector<ingest::TrialRecording> generate_matrix(const GaitModelParams& base, const MatrixSpec& spec) {
    std::vector<ingest::TrialRecording> trials;
    std::uint64_t cell = 0;
    auto seed_for = [&](std::uint64_t c) { return base.seed * 1000003ULL + c * 7919ULL + 17ULL; };
    char id[96];
    for (std::size_t r = 0; r < spec.rows.size(); ++r) {
        const auto& row = spec.rows[r];
        std::size_t in_row = 0;
        for (double magnitude : row.magnitudes) {
            for (double phase : row.onset_phases) {
                PerturbationSpec p;
                p.kind = row.kind;
                p.magnitude = magnitude;
                p.onset_phase = phase;
                p.onset_stride = spec.onset_stride;
                p.duration_s = spec.duration_s;
                p.direction = kAllDirections[in_row % kAllDirections.size()];
                GaitModelParams g = base;
                g.seed = seed_for(cell++);
                std::snprintf(id, sizeof(id), "r%02zu_%s_m%g_p%g_%02zu", r, to_string(row.kind).data(), magnitude,
                              phase, in_row);
                trials.push_back(generate_trial(g, p, id));
                ++in_row;
            }
        }
        for (std::size_t c = 0; c < spec.controls_per_row; ++c) {
            GaitModelParams g = base;
            g.seed = seed_for(cell++);
            std::snprintf(id, sizeof(id), "r%02zu_control_%02zu", r, c);
            trials.push_back(generate_trial(g, std::nullopt, id));
        }
    }
    std::sort(trials.begin(), trials.end(),
              [](const auto& a, const auto& b) { return a.trial_id < b.trial_id; });
    return trials;
}

MatrixSpec benchmark_matrix() {
    // Right single stance spans 10-50% of the cycle; belt onsets sit at 0, 25,
    // 50 and 75% of it.
    MatrixSpec m;
    m.rows = {
        {PerturbationKind::trip, {1.5, 3.0, 4.5}, {10.0, 20.0, 30.0, 40.0}},
        {PerturbationKind::slip, {1.5, 3.0, 4.5}, {10.0, 20.0, 30.0, 40.0}},
        {PerturbationKind::translation, {0.05, 0.10, 0.15}, {10.0, 30.0, 50.0, 75.0}},
    };
    m.controls_per_row = 4;
    return m;
}

}  // namespace gaitpd::synth
