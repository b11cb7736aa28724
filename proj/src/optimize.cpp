#include "gaitpd/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "gaitpd/analysis.hpp"

namespace gaitpd::optimize {

void SweepRange::validate() const {
    if (!(t_min < t_max)) throw Error(ErrorCode::InvalidConfig, "sweep needs t_min < t_max");
    if (!(step > 0.0)) throw Error(ErrorCode::InvalidConfig, "sweep step must be positive");
}

std::vector<double> SweepRange::thresholds() const {
    validate();
    const auto count = static_cast<std::size_t>(std::floor((t_max - t_min) / step + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        // Rounded to 1e-12 so that printed thresholds come out clean.
        out.push_back(std::round((t_min + static_cast<double>(k) * step) * 1e12) / 1e12);
    }
    return out;
}

std::size_t default_threads() {
    if (const char* env = std::getenv("GAITPD_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

TrialTrace trace_trial(const ingest::TrialRecording& trial, const detector::PipelineConfig& config) {
    auto analysis = detector::analyze_trial(trial, config);
    return {analysis.trial_id, analysis.phi_trace(), std::move(analysis.cycles), analysis.truth};
}

std::vector<TrialTrace> compute_traces(std::span<const ingest::TrialRecording> trials,
                                       const detector::PipelineConfig& config, std::size_t threads) {
    if (trials.empty()) throw Error(ErrorCode::EmptyTrialSet, "no trials to trace");
    std::vector<TrialTrace> out(trials.size());
    const std::size_t workers = std::min(trials.size(), threads ? threads : default_threads());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < trials.size(); i = next++) {
            try {
                out[i] = trace_trial(trials[i], config);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.trial_id < b.trial_id; });
    return out;
}

std::vector<detector::TrialRow> classify_all(std::span<const TrialTrace> traces, double threshold,
                                             double tp_window_cycles) {
    std::vector<detector::TrialRow> rows;
    rows.reserve(traces.size());
    for (const auto& t : traces) {
        auto row = detector::classify_and_delay(t.phi, t.cycles, t.truth, threshold, tp_window_cycles);
        row.trial_id = t.trial_id;
        rows.push_back(std::move(row));
    }
    return rows;
}

SweepPoint evaluate_threshold(std::span<const TrialTrace> traces, double threshold, double tp_window_cycles) {
    const auto report = analysis::evaluate(classify_all(traces, threshold, tp_window_cycles), "kinematic");
    SweepPoint p;
    p.threshold = threshold;
    p.accuracy = report.accuracy;
    p.fp = report.fp;
    p.fn = report.fn;
    p.tp = report.tp;
    p.tn = report.tn;
    p.mean_delay_pct = report.delay_mean;
    return p;
}

SweepResult sweep_traces(std::span<const TrialTrace> traces, const SweepRange& range, double tp_window_cycles) {
    if (traces.empty()) throw Error(ErrorCode::EmptyTrialSet, "no trials to sweep");
    SweepResult result;
    for (double t : range.thresholds()) result.points.push_back(evaluate_threshold(traces, t, tp_window_cycles));
    result.chosen = select_index(result.points);
    return result;
}

namespace {

// The rolling-window exclusion is pinned to the configured value so that the
// phi trace is the same whichever detection threshold is being scored.
detector::PipelineConfig pinned(const detector::PipelineConfig& config) {
    auto out = config;
    out.detector.exclusion_phi = config.detector.exclusion_threshold();
    return out;
}

}  // namespace

SweepResult sweep(std::span<const ingest::TrialRecording> trials, const detector::PipelineConfig& config,
                  const SweepRange& range, std::size_t threads) {
    if (trials.empty()) throw Error(ErrorCode::EmptyTrialSet, "no trials to sweep");
    range.validate();
    const auto traces = compute_traces(trials, pinned(config), threads);
    return sweep_traces(traces, range, config.detector.tp_window_cycles);
}

SweepResult sweep_uncached(std::span<const ingest::TrialRecording> trials, const detector::PipelineConfig& config,
                           const SweepRange& range) {
    if (trials.empty()) throw Error(ErrorCode::EmptyTrialSet, "no trials to sweep");
    const auto base = pinned(config);
    SweepResult result;
    for (double t : range.thresholds()) {
        auto cfg = base;
        cfg.detector.threshold_phi = t;
        std::vector<detector::TrialRow> rows;
        for (const auto& trial : trials) {
            const auto a = detector::analyze_trial(trial, cfg);
            auto row = detector::classify_and_delay(a.phi_trace(), a.cycles, a.truth, t, cfg.detector.tp_window_cycles);
            row.trial_id = a.trial_id;
            rows.push_back(std::move(row));
        }
        const auto report = analysis::evaluate(std::move(rows), "kinematic");
        result.points.push_back({t, report.accuracy, report.fp, report.fn, report.tp, report.tn, report.delay_mean});
    }
    result.chosen = select_index(result.points);
    return result;
}

std::size_t select_index(std::span<const SweepPoint> points) {
    if (points.empty()) throw Error(ErrorCode::EmptyRows, "empty sweep");
    constexpr double kNoDelay = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        const auto& a = points[i];
        const auto& b = points[best];
        const double da = a.mean_delay_pct.value_or(kNoDelay);
        const double db = b.mean_delay_pct.value_or(kNoDelay);
        if (a.errors() != b.errors()) {
            if (a.errors() < b.errors()) best = i;
        } else if (da != db) {
            if (da < db) best = i;
        } else if (a.threshold < b.threshold) {
            best = i;
        }
    }
    return best;
}

double select_threshold(const SweepResult& result) { return result.points.at(select_index(result.points)).threshold; }

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << "threshold,accuracy,fp,fn,tp,tn,mean_delay_pct\n";
    char buf[160];
    for (const auto& p : result.points) {
        std::snprintf(buf, sizeof(buf), "%.6g,%.9g,%zu,%zu,%zu,%zu,", p.threshold, p.accuracy, p.fp, p.fn, p.tp,
                      p.tn);
        out << buf;
        if (p.mean_delay_pct) {
            std::snprintf(buf, sizeof(buf), "%.9g", *p.mean_delay_pct);
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace gaitpd::optimize
