// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "gaitpd/analysis.hpp"
#include "gaitpd/baseline_wbam.hpp"
#include "gaitpd/detector.hpp"
#include "gaitpd/gait.hpp"
#include "gaitpd/ingest.hpp"
#include "gaitpd/kinematics.hpp"
#include "gaitpd/optimize.hpp"
#include "gaitpd/stats.hpp"
#include "gaitpd/synth.hpp"

using namespace gaitpd;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

bool near(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

synth::GaitModelParams params(std::uint64_t seed) {
    synth::GaitModelParams p;
    p.seed = seed;
    return p;
}

// Ten perturbed and ten steady trials of mixed kinds.
std::vector<ingest::TrialRecording> mixed_trials() {
    std::vector<ingest::TrialRecording> out;
    const PerturbationKind kinds[3] = {PerturbationKind::trip, PerturbationKind::slip, PerturbationKind::translation};
    for (std::uint64_t i = 0; i < 20; ++i) {
        if (i % 2 == 0) {
            out.push_back(synth::generate_trial(params(500 + i), std::nullopt, "steady" + std::to_string(i)));
            continue;
        }
        synth::PerturbationSpec s;
        s.kind = kinds[i % 3];
        s.magnitude = s.kind == PerturbationKind::translation ? 0.1 : 3.0;
        s.onset_phase = 10.0 + 5.0 * static_cast<double>(i % 5);
        s.direction = kAllDirections[i % 8];
        out.push_back(synth::generate_trial(params(500 + i), s, "pert" + std::to_string(i)));
    }
    return out;
}

Outcome streaming_equals_batch() {
    const auto trials = mixed_trials();
    const auto t0 = Clock::now();
    std::size_t samples = 0, mismatches = 0;
    for (const auto& t : trials) {
        const auto a = detector::analyze_trial(t);
        const auto batch = detector::detect_batch(a.states, a.segmentation, detector::DetectorConfig{}, a.sample_rate);
        const auto stream = a.phi_trace();
        samples += stream.size();
        if (batch.phi.size() != stream.size()) {
            ++mismatches;
            continue;
        }
        for (std::size_t i = 0; i < stream.size(); ++i) {
            // bit-for-bit: same engagement and the same double
            if (stream[i].has_value() != batch.phi[i].has_value() || (stream[i] && *stream[i] != *batch.phi[i])) {
                ++mismatches;
            }
        }
    }
    const double secs = seconds_since(t0);
    return {mismatches == 0 && secs < 5.0,
            std::to_string(samples) + " samples, " + std::to_string(mismatches) + " mismatches, " + fmt("%.2f s", secs)};
}

Outcome formula_suite() {
    std::vector<std::string> failed;
    auto check = [&](bool ok, const char* name) {
        if (!ok) failed.emplace_back(name);
    };

    // cubic gap fill of t^2 at t = 0,1,3,4
    {
        const std::vector<double> s = {0.0, 1.0, kMissing, 9.0, 16.0};
        check(near(ingest::fill_gaps(s).series[2], 4.0), "gap fill");
    }
    // COM as the mean of the pelvic markers
    {
        ingest::MarkerFrame f;
        f[ingest::Marker::rasis] = {1, 0, 0};
        f[ingest::Marker::lasis] = {0, 1, 0};
        f[ingest::Marker::rpsis] = {0, 0, 1};
        f[ingest::Marker::lpsis] = {1, 1, 1};
        const auto c = kinematics::compute_com(f);
        check(near(c.x, 0.5) && near(c.y, 0.5) && near(c.z, 0.5), "com");

        f[ingest::Marker::rheel] = {0.4, 0.1, 0.05};
        f[ingest::Marker::lheel] = {0.0, -0.1, 0.05};
        const auto r = kinematics::relative_states(f, {0.25, 0.02, 1.0});
        check(near(r[idx(StateIndex::com_rel_midfeet_x)], 0.05) && near(r[idx(StateIndex::com_rel_midfeet_y)], 0.02),
              "com relative to mid-feet");
    }
    // central difference of t^2
    {
        std::vector<double> x(50);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::pow(i / 100.0, 2);
        const auto v = kinematics::differentiate(x, 100.0);
        bool ok = true;
        for (std::size_t i = 1; i + 1 < x.size(); ++i) ok = ok && near(v[i], 2.0 * i / 100.0);
        check(ok, "velocity of t^2");
    }
    // refractory suppression
    {
        std::vector<double> grf(200, 0.0);
        for (std::size_t i = 50; i < 60; ++i) grf[i] = 100.0;
        for (std::size_t i = 70; i < 80; ++i) grf[i] = 100.0;
        check(gait::detect_heel_strikes(grf, 100.0).size() == 1, "refractory");
    }
    // ramp onto five bins
    {
        std::vector<StateVector> s(10);
        for (std::size_t i = 0; i < s.size(); ++i) s[i].fill(static_cast<double>(i));
        const auto m = gait::resample_cycle(s, {0, 9, 0.09, true}, 5);
        const double want[5] = {0.0, 1.8, 3.6, 5.4, 7.2};
        bool ok = true;
        for (std::size_t k = 0; k < 5; ++k) ok = ok && near(m[k][0], want[k]);
        check(ok, "resample");
    }
    // population sd over a two-cycle window, and CoV
    {
        std::vector<CycleMatrix> w(2, CycleMatrix(1));
        w[0][0].fill(1.0);
        w[1][0].fill(3.0);
        const auto b = stats::summarize(w, 1, stats::kDefaultEpsilon);
        check(near(b.mean[0][0], 2.0) && near(b.sd[0][0], 1.0), "window stats");
        check(near(stats::coefficient_of_variation(-0.5, 0.1), 0.2), "cov");
    }
    // alpha and phi
    {
        const auto up = detector::alpha(1.35, 1.0, 0.1, 2.0);
        const auto down = detector::alpha(0.50, 1.0, 0.1, 2.0);
        check(near(up.magnitude, 0.15) && up.sign == 1, "alpha upper");
        check(near(down.magnitude, 0.30) && down.sign == -1, "alpha lower");
        const double a2[2] = {0.15, 0.0}, c2[2] = {0.1, 0.2};
        check(near(detector::phi(a2, c2), 0.5 * 0.15 / 0.35), "phi two states");
        std::vector<double> a16(16, 0.0), c16(16, 0.05);
        for (std::size_t s = 0; s < 8; ++s) a16[s] = 0.15;
        check(near(detector::phi(a16, c16), 0.30), "phi eight states");
    }
    // WBAM band and either-plane rule
    {
        std::vector<gait::GaitCycle> cycles;
        for (std::size_t i = 0; i < 5; ++i) cycles.push_back({i * 100, (i + 1) * 100, 1.0, true});
        std::vector<double> alt(600);
        for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 == 0 ? 1.0 : -1.0;
        const auto b = baseline::fit_channel(alt, cycles, 3, 500);
        check(near(b.mean, 0.0) && near(b.sd, 1.0), "wbam band");
        std::vector<double> sag(1000, 0.0), front(1000, 0.0);
        front[812] = 5.0;
        baseline::WbamBand band;
        band.sagittal = band.frontal = {0.0, 1.0};
        check(baseline::detect_wbam(sag, front, band, 0) == std::optional<std::size_t>(812), "wbam either plane");
    }
    // 2x2 PCA
    {
        const double a = std::sqrt(3.0), b = 1.0;
        analysis::Matrix m(4, 2);
        const double pts[4][2] = {{a, a}, {-a, -a}, {b, -b}, {-b, b}};
        for (std::size_t r = 0; r < 4; ++r) {
            m(r, 0) = pts[r][0];
            m(r, 1) = pts[r][1];
        }
        const auto p = analysis::pca(m, 2, false);
        check(near(p.explained_variance[0], 3.0) && near(p.explained_variance[1], 1.0) &&
                  near(p.components(0, 0), std::sqrt(0.5)) && near(p.components(0, 1), std::sqrt(0.5)),
              "pca 2x2");
    }
    // delay arithmetic
    {
        const std::vector<detector::CycleRecord> cycles = {
            {0, 1000, true, true, 0.0, false, true},
            {1000, 2000, false, true, 0.0, false, false},
            {2000, 3000, false, true, 0.0, false, false},
        };
        std::vector<std::optional<double>> phi(3000);
        for (std::size_t i = 1000; i < 3000; ++i) phi[i] = 0.0;
        phi[1431] = 0.2;
        const auto row = detector::classify_and_delay(phi, cycles, PerturbationLabel{1200, PerturbationKind::trip, {}, 3.0},
                                                      0.125);
        check(row.tp == 1 && row.delay_pct && near(*row.delay_pct, 23.1), "delay percent");

        std::vector<detector::TrialRow> rows(2);
        rows[0].trial_id = "a";
        rows[0].tp = 1;
        rows[0].delay_pct = 20.0;
        rows[1].trial_id = "b";
        rows[1].tp = 1;
        rows[1].delay_pct = 30.0;
        const auto rep = analysis::evaluate(rows, "kinematic");
        check(near(*rep.delay_mean, 25.0) && near(*rep.delay_sd, 5.0), "delay mean and sd");
    }
    // slip belt velocity integral
    {
        synth::PerturbationSpec slip;
        slip.kind = PerturbationKind::slip;
        slip.magnitude = 3.0;
        slip.duration_s = 0.5;
        check(near(synth::belt_velocity_change(slip, 0.5), -1.5), "slip integral");
    }

    std::string detail = failed.empty() ? "all examples within 1e-9" : "failed:";
    for (const auto& f : failed) detail += " " + f;
    return {failed.empty(), detail};
}

struct Benchmark {
    std::vector<ingest::TrialRecording> trials;
    std::vector<optimize::TrialTrace> traces;
};

Outcome synthetic_benchmark(const Benchmark& b, double secs) {
    const auto rows = optimize::classify_all(b.traces, detector::kDefaultThreshold, 1.5);
    const auto rep = analysis::evaluate(rows, "kinematic");
    std::size_t control_fp = 0, control_units = 0;
    double max_delay = 0.0;
    bool delays_ok = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!b.traces[i].truth) {
            control_fp += rows[i].fp;
            control_units += rows[i].fp + rows[i].tn;
        }
        if (rows[i].tp > 0 && rows[i].delay_pct) {
            max_delay = std::max(max_delay, *rows[i].delay_pct);
            delays_ok = delays_ok && *rows[i].delay_pct <= 50.0;
        }
    }
    const double fp_rate = control_units ? static_cast<double>(control_fp) / static_cast<double>(control_units) : 0.0;
    const bool ok = b.trials.size() >= 40 && rep.accuracy >= 0.95 && fp_rate <= 0.02 && delays_ok && secs < 30.0;
    return {ok, std::to_string(b.trials.size()) + " trials, accuracy " + analysis::format_percent(rep.accuracy) +
                    ", control FP rate " + fmt("%.4f", fp_rate) + ", max delay " + fmt("%.1f%%", max_delay) + ", " +
                    fmt("%.2f s", secs)};
}

Outcome threshold_monotonicity(const Benchmark& b) {
    const auto result = optimize::sweep_traces(b.traces, {0.01, 1.0, 0.01}, 1.5);
    bool mono = true;
    std::size_t best = result.points.front().errors();
    for (std::size_t i = 0; i < result.points.size(); ++i) {
        best = std::min(best, result.points[i].errors());
        if (i == 0) continue;
        mono = mono && result.points[i].fp <= result.points[i - 1].fp && result.points[i].fn >= result.points[i - 1].fn;
    }
    const auto& chosen = result.points[result.chosen];
    const bool ok = mono && chosen.errors() == best && optimize::select_threshold(result) == chosen.threshold;
    return {ok, std::to_string(result.points.size()) + " thresholds, monotone " + (mono ? "yes" : "no") +
                    ", selected " + fmt("%.2f", chosen.threshold) + " with " + std::to_string(chosen.errors()) +
                    " errors (minimum " + std::to_string(best) + ")"};
}

Outcome sweep_caching(const Benchmark& b) {
    // Two controls and three perturbed trials from the benchmark set.
    std::vector<ingest::TrialRecording> five;
    std::size_t controls = 0;
    for (const auto& t : b.trials) {
        if (five.size() == 5) break;
        if (!t.perturbation && controls < 2) {
            five.push_back(t);
            ++controls;
        } else if (t.perturbation && five.size() - controls < 3) {
            five.push_back(t);
        }
    }
    const optimize::SweepRange range{0.05, 0.55, 0.05};
    detector::PipelineConfig cfg;
    const auto cached = optimize::sweep(five, cfg, range);
    const auto naive = optimize::sweep_uncached(five, cfg, range);
    return {cached == naive && cached.points.size() == 11,
            std::to_string(five.size()) + " trials x " + std::to_string(cached.points.size()) + " thresholds, " +
                (cached == naive ? "identical" : "different")};
}

Outcome wbam_contract() {
    std::mt19937_64 rng(20261018);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t fired_on_spike = 0, fired_inside = 0;
    constexpr std::size_t kTrials = 1000;
    for (std::size_t trial = 0; trial < kTrials; ++trial) {
        const double mean_s = u(rng) * 2.0 - 1.0, sd_s = 0.01 + u(rng);
        const double mean_f = u(rng) * 2.0 - 1.0, sd_f = 0.01 + u(rng);
        const std::size_t len = 80 + static_cast<std::size_t>(u(rng) * 60);
        const std::size_t history = 3 + trial % 3;
        std::vector<gait::GaitCycle> cycles;
        for (std::size_t c = 0; c < 8; ++c) cycles.push_back({c * len, (c + 1) * len, len / 100.0, true});
        std::normal_distribution<double> ns(mean_s, sd_s), nf(mean_f, sd_f);
        std::vector<double> sag(8 * len), front(8 * len);
        for (std::size_t i = 0; i < sag.size(); ++i) {
            sag[i] = ns(rng);
            front[i] = nf(rng);
        }
        const std::size_t from = 6 * len;
        const auto band = baseline::fit_band(sag, front, cycles, history, from);
        // Evaluated stretch strictly inside the band.
        for (std::size_t i = from; i < sag.size(); ++i) {
            sag[i] = band.sagittal.mean + (u(rng) * 2.0 - 1.0) * 0.999 * band.k * band.sagittal.sd;
            front[i] = band.frontal.mean + (u(rng) * 2.0 - 1.0) * 0.999 * band.k * band.frontal.sd;
        }
        if (baseline::detect_wbam(sag, front, band, from)) ++fired_inside;

        const std::size_t at = from + static_cast<std::size_t>(u(rng) * static_cast<double>(sag.size() - from - 1));
        const double sign = u(rng) < 0.5 ? -1.0 : 1.0;
        if (trial % 2 == 0) {
            sag[at] = band.sagittal.mean + sign * 5.0 * band.sagittal.sd;
        } else {
            front[at] = band.frontal.mean + sign * 5.0 * band.frontal.sd;
        }
        if (baseline::detect_wbam(sag, front, band, from) == std::optional<std::size_t>(at)) ++fired_on_spike;
    }
    return {fired_on_spike == kTrials && fired_inside == 0,
            std::to_string(kTrials) + " trials, fired on " + std::to_string(fired_on_spike) + " spikes, " +
                std::to_string(fired_inside) + " in-band detections"};
}

Outcome drift_immunity() {
    const auto steady = synth::generate_trial(params(77), std::nullopt, "steady");
    auto drifted = steady;
    for (std::size_t i = 0; i < drifted.frames.size(); ++i) {
        const double dx = 0.2 * static_cast<double>(i) / drifted.sample_rate;
        for (std::size_t m = 0; m < ingest::kNumMarkers; ++m) drifted.frames[i][static_cast<ingest::Marker>(m)].x += dx;
    }
    const auto a = kinematics::build_state_sequence(steady);
    const auto b = kinematics::build_state_sequence(drifted);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t s = 0; s < kNumPositionStates; ++s) worst = std::max(worst, std::abs(a[i][s] - b[i][s]));
    }
    const auto run = detector::analyze_trial(drifted);
    const auto row = detector::classify_and_delay(run.phi_trace(), run.cycles, run.truth, detector::kDefaultThreshold);
    const bool none = !run.detection_sample && row.fp == 0;
    return {worst <= 1e-9 && none, "max relative position change " + fmt("%.2e", worst) + ", detections " +
                                       std::to_string(row.fp + (run.detection_sample ? 1 : 0))};
}

Outcome phi_bounds() {
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t violations = 0;
    double worst_single = 0.0;
    constexpr std::size_t kCases = 10000;
    for (std::size_t c = 0; c < kCases; ++c) {
        std::vector<double> a(kNumStates, 0.0), cov(kNumStates);
        for (std::size_t s = 0; s < kNumStates; ++s) {
            cov[s] = std::pow(10.0, -6.0 + 8.0 * u(rng));
            if (u(rng) < 0.6) a[s] = std::pow(10.0, -6.0 + 10.0 * u(rng));
        }
        const double p = detector::phi(a, cov);
        if (!(p >= 0.0 && p < 1.0)) ++violations;

        std::vector<double> single(kNumStates, 0.0);
        single[c % kNumStates] = std::pow(10.0, -6.0 + 12.0 * u(rng));
        const double q = detector::phi(single, cov);
        worst_single = std::max(worst_single, q);
        if (!(q < 1.0 / 16.0)) ++violations;
    }
    return {violations == 0, std::to_string(kCases) + " cases, " + std::to_string(violations) +
                                 " violations, largest single-state phi " + fmt("%.12g", worst_single)};
}

Outcome step_throughput() {
    const auto trial = synth::generate_trial(params(90), std::nullopt, "perf");
    const auto a = detector::analyze_trial(trial);
    std::size_t steps = 0;
    double secs = 0.0;
    double sink = 0.0;
    while (steps < 200000) {
        detector::Session session({}, a.sample_rate);
        const auto t0 = Clock::now();
        for (std::size_t i = 0; i < a.states.size(); ++i) {
            const auto s = session.step(a.states[i], a.segmentation.phase[i], a.segmentation.boundary[i]);
            sink += s.phi.value_or(0.0);
        }
        secs += seconds_since(t0);
        steps += a.states.size();
    }
    const double rate = static_cast<double>(steps) / secs;
    return {rate >= 1e5 && std::isfinite(sink), fmt("%.3g samples/s", rate)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome cli_determinism() {
    const fs::path dir = fs::path(GAITPD_TEST_TMP) / "acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ostringstream sink;
    auto run = [&](std::vector<std::string> args) { return cli::run(args, sink, sink); };
    int codes = 0;
    for (const char* tag : {"a", "b"}) {
        codes += run({"simulate", "--seed", "5", "--out", (dir / (std::string("sim_") + tag + ".csv")).string()});
        codes += run({"sweep", "--out", (dir / (std::string("sweep_") + tag + ".csv")).string()});
    }
    const bool sim_same = slurp(dir / "sim_a.csv") == slurp(dir / "sim_b.csv") &&
                          slurp(dir / "sim_a.label.json") == slurp(dir / "sim_b.label.json");
    const auto sweep_a = slurp(dir / "sweep_a.csv");
    const bool sweep_same = !sweep_a.empty() && sweep_a == slurp(dir / "sweep_b.csv");
    return {codes == 0 && sim_same && sweep_same, std::string("simulate ") + (sim_same ? "identical" : "different") +
                                                      ", sweep " + (sweep_same ? "identical" : "different")};
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int n, const char* name, const Outcome& o) {
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << name << " (" << o.detail << ")"
                  << std::endl;
        failures += o.pass ? 0 : 1;
    };
    auto guarded = [](const std::function<Outcome()>& f) {
        try {
            return f();
        } catch (const std::exception& e) {
            return Outcome{false, std::string("exception: ") + e.what()};
        }
    };

    report(1, "streaming matches batch", guarded(streaming_equals_batch));
    report(2, "formula suite", guarded(formula_suite));

    Benchmark bench;
    double bench_secs = 0.0;
    const auto bench_ok = guarded([&] {
        const auto t0 = Clock::now();
        bench.trials = synth::generate_matrix(params(1), synth::benchmark_matrix());
        bench.traces = optimize::compute_traces(bench.trials, detector::PipelineConfig{});
        bench_secs = seconds_since(t0);
        return synthetic_benchmark(bench, bench_secs);
    });
    report(3, "synthetic benchmark", bench_ok);
    report(4, "threshold monotonicity", guarded([&] { return threshold_monotonicity(bench); }));
    report(5, "sweep caching equivalence", guarded([&] { return sweep_caching(bench); }));
    report(6, "WBAM baseline contract", guarded(wbam_contract));
    report(7, "drift immunity", guarded(drift_immunity));
    report(8, "phi bounds", guarded(phi_bounds));
    report(9, "step throughput", guarded(step_throughput));
    report(10, "determinism", guarded(cli_determinism));
    return failures == 0 ? 0 : 1;
}
