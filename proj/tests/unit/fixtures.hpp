#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gaitpd/ingest.hpp"
#include "gaitpd/synth.hpp"

namespace fixtures {

using gaitpd::ingest::Marker;
using gaitpd::ingest::MarkerFrame;
using gaitpd::ingest::TrialRecording;

inline std::string header_line(bool wbam = false) {
    std::string out;
    for (const auto& name : gaitpd::ingest::csv_header(wbam)) out += (out.empty() ? "" : ",") + name;
    return out + "\n";
}

// One CSV row with every marker coordinate set to `v`, GRF right/left.
inline std::string row_line(double t, double v, double grf_r, double grf_l) {
    char buf[64];
    std::string out;
    std::snprintf(buf, sizeof(buf), "%.6g", t);
    out += buf;
    for (int i = 0; i < 24; ++i) {
        std::snprintf(buf, sizeof(buf), ",%.6g", v + 0.001 * i);
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), ",%.6g,%.6g\n", grf_r, grf_l);
    return out + buf;
}

/// Every marker frozen at fixed positions; GRF zero.
inline TrialRecording still_trial(std::size_t n, double rate = 100.0) {
    TrialRecording t;
    t.trial_id = "still";
    t.sample_rate = rate;
    MarkerFrame f;
    f[Marker::rasis] = {0.1, -0.12, 1.0};
    f[Marker::lasis] = {0.1, 0.12, 1.0};
    f[Marker::rpsis] = {-0.1, -0.06, 1.0};
    f[Marker::lpsis] = {-0.1, 0.06, 1.0};
    f[Marker::rheel] = {0.3, -0.1, 0.05};
    f[Marker::lheel] = {-0.2, 0.1, 0.05};
    f[Marker::rtoe] = {0.45, -0.1, 0.03};
    f[Marker::ltoe] = {-0.05, 0.1, 0.03};
    t.frames.assign(n, f);
    t.grf_right_z.assign(n, 0.0);
    t.grf_left_z.assign(n, 0.0);
    return t;
}

inline gaitpd::synth::GaitModelParams quiet_params(std::uint64_t seed = 1) {
    gaitpd::synth::GaitModelParams p;
    p.seed = seed;
    return p;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::path(GAITPD_TEST_TMP) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fixtures
