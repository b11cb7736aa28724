#include "gaitpd/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace gaitpd::detector {

void DetectorConfig::validate() const {
    if (!(threshold_phi > 0.0 && threshold_phi < 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "threshold_phi must lie in (0, 1)");
    }
    if (!(band_k > 0.0)) throw Error(ErrorCode::InvalidConfig, "band_k must be positive");
    if (window_cycles == 0) throw Error(ErrorCode::InvalidConfig, "window_cycles must be positive");
    if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidConfig, "epsilon must be positive");
    if (bins < 2) throw Error(ErrorCode::InvalidConfig, "bins must be at least 2");
    if (!(tp_window_cycles > 0.0)) throw Error(ErrorCode::InvalidConfig, "tp_window_cycles must be positive");
    if (exclusion_phi && !(*exclusion_phi > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "exclusion_phi must be positive");
    }
    if (!(plausibility.min_s < plausibility.max_s)) {
        throw Error(ErrorCode::InvalidConfig, "cycle plausibility band is empty");
    }
}

Alpha alpha(double x, double mean, double sd, double band_k) {
    const double dev = x - mean;
    const double magnitude = std::max(0.0, std::abs(dev) - band_k * sd);
    if (magnitude > 0.0) return {magnitude, dev > 0.0 ? 1 : -1};
    return {0.0, 0};
}

double phi(std::span<const double> alphas, std::span<const double> covs) {
    if (alphas.size() != covs.size()) throw Error(ErrorCode::DimensionMismatch, "alpha/cov length mismatch");
    if (alphas.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t j = 0; j < alphas.size(); ++j) {
        const double denom = 2.0 * covs[j] + alphas[j];
        if (denom > 0.0) sum += alphas[j] / denom;
    }
    return sum / static_cast<double>(alphas.size());
}

std::size_t phase_bin(double phase, std::size_t bins) noexcept {
    const auto b = static_cast<std::size_t>(std::lround(phase * static_cast<double>(bins) / 100.0));
    return b % bins;
}

namespace {

// Shared by Session and detect_batch so both routes use the same arithmetic
// for one sample.
double evaluate_sample(const StateVector& x, const stats::BandStatistics& band, std::size_t bin, double band_k,
                       StateVector& signed_alpha) {
    StateVector mags;
    const StateVector& mean = band.mean[bin];
    const StateVector& sd = band.sd[bin];
    for (std::size_t s = 0; s < kNumStates; ++s) {
        const Alpha a = alpha(x[s], mean[s], sd[s], band_k);
        mags[s] = a.magnitude;
        signed_alpha[s] = a.signed_value();
    }
    return phi(mags, band.cov[bin]);
}

}  // namespace

Session::Session(DetectorConfig config, double sample_rate)
    : config_(std::move(config)),
      sample_rate_(sample_rate),
      exclusion_(config_.exclusion_threshold()),
      model_(config_.window_cycles, config_.bins, config_.epsilon) {
    config_.validate();
    if (!(sample_rate_ > 0.0)) throw Error(ErrorCode::InvalidConfig, "sample_rate must be positive");
    buffer_.reserve(static_cast<std::size_t>(sample_rate_ * 3.0));
}

void Session::close_cycle(const StateVector& end_state) {
    buffer_.push_back(end_state);
    current_.end = next_index_;
    const double duration = static_cast<double>(current_.length()) / sample_rate_;
    current_.plausible = duration >= config_.plausibility.min_s && duration <= config_.plausibility.max_s;
    current_.crossed = !current_.calibrating && current_.max_phi >= config_.threshold_phi;

    bool push = false;
    if (!current_.plausible) {
        push = false;
    } else if (current_.calibrating) {
        push = true;
    } else if (current_.max_phi >= exclusion_) {
        skip_next_push_ = true;
    } else if (skip_next_push_) {
        skip_next_push_ = false;
    } else {
        push = true;
    }
    if (push) {
        const gait::GaitCycle local{0, buffer_.size() - 1, duration, true};
        model_.push_cycle(gait::resample_cycle(buffer_, local, config_.bins));
    }
    current_.pushed = push;
    cycles_.push_back(current_);
    open_ = false;
}

Sample Session::step(const StateVector& state, std::optional<double> phase, bool cycle_boundary) {
    Sample out;
    out.index = next_index_;
    out.phase = phase;

    if (cycle_boundary) {
        if (open_) close_cycle(state);
        if (phase) {
            open_ = true;
            buffer_.clear();
            current_ = CycleRecord{};
            current_.start = next_index_;
            current_.calibrating = !model_.valid();
        }
    }
    ++next_index_;

    if (!phase || !open_) {
        ++skipped_;
        out.status = SampleStatus::skipped;
        out.detected = detection_sample_.has_value();
        return out;
    }
    buffer_.push_back(state);
    if (current_.calibrating) {
        out.status = SampleStatus::calibrating;
        out.detected = detection_sample_.has_value();
        return out;
    }

    const std::size_t bin = phase_bin(*phase, config_.bins);
    const double p = evaluate_sample(state, model_.statistics(), bin, config_.band_k, out.alpha);
    current_.max_phi = std::max(current_.max_phi, p);
    if (p >= config_.threshold_phi && !detection_sample_) detection_sample_ = out.index;
    out.status = SampleStatus::evaluated;
    out.phi = p;
    out.detected = detection_sample_.has_value();
    return out;
}

PhiTrace detect_batch(std::span<const StateVector> states, const gait::Segmentation& segmentation,
                      const DetectorConfig& config, double sample_rate) {
    config.validate();
    PhiTrace trace;
    trace.phi.assign(states.size(), std::nullopt);
    const double exclusion = config.exclusion_threshold();

    std::vector<CycleMatrix> resampled;
    resampled.reserve(segmentation.cycles.size());
    for (const auto& c : segmentation.cycles) resampled.push_back(gait::resample_cycle(states, c, config.bins));

    std::vector<CycleMatrix> window;
    bool skip_next = false;
    StateVector scratch;
    for (std::size_t ci = 0; ci < segmentation.cycles.size(); ++ci) {
        const auto& c = segmentation.cycles[ci];
        CycleRecord rec;
        rec.start = c.start;
        rec.end = c.end;
        rec.calibrating = window.size() < config.window_cycles;
        const double duration = static_cast<double>(c.length()) / sample_rate;
        rec.plausible = duration >= config.plausibility.min_s && duration <= config.plausibility.max_s;

        if (!rec.calibrating) {
            const auto band = stats::summarize(window, config.bins, config.epsilon);
            for (std::size_t s = c.start; s < c.end; ++s) {
                const double p =
                    evaluate_sample(states[s], band, phase_bin(*segmentation.phase[s], config.bins), config.band_k,
                                    scratch);
                trace.phi[s] = p;
                rec.max_phi = std::max(rec.max_phi, p);
            }
            rec.crossed = rec.max_phi >= config.threshold_phi;
        }

        bool push = false;
        if (!rec.plausible) {
        } else if (rec.calibrating) {
            push = true;
        } else if (rec.max_phi >= exclusion) {
            skip_next = true;
        } else if (skip_next) {
            skip_next = false;
        } else {
            push = true;
        }
        if (push) {
            window.push_back(resampled[ci]);
            if (window.size() > config.window_cycles) window.erase(window.begin());
        }
        rec.pushed = push;
        trace.cycles.push_back(rec);
    }
    return trace;
}

std::vector<std::optional<double>> TrialAnalysis::phi_trace() const {
    std::vector<std::optional<double>> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.phi);
    return out;
}

TrialAnalysis analyze_trial(ingest::TrialRecording trial, const PipelineConfig& config) {
    config.detector.validate();
    TrialAnalysis out;
    out.trial_id = trial.trial_id;
    out.sample_rate = trial.sample_rate;
    out.truth = trial.perturbation;
    out.repair = ingest::repair_trial(trial, config.max_gap);
    out.states = kinematics::build_state_sequence(trial, config.kinematics);
    out.heel_strikes = gait::detect_heel_strikes(trial.grf_right_z, trial.sample_rate, config.heel_strike);
    out.segmentation = gait::segment_and_phase(out.heel_strikes, trial.size(), trial.sample_rate,
                                               config.detector.plausibility);

    Session session(config.detector, trial.sample_rate);
    out.samples.reserve(trial.size());
    for (std::size_t i = 0; i < trial.size(); ++i) {
        out.samples.push_back(session.step(out.states[i], out.segmentation.phase[i], out.segmentation.boundary[i]));
    }
    out.cycles = session.cycles();
    out.detection_sample = session.detection_sample();
    out.skipped = session.skipped();
    return out;
}

TrialRow classify_and_delay(std::span<const std::optional<double>> phi, std::span<const CycleRecord> cycles,
                            const std::optional<PerturbationLabel>& truth, double threshold,
                            double tp_window_cycles) {
    TrialRow row;
    auto crosses = [&](std::size_t s) { return s < phi.size() && phi[s] && *phi[s] >= threshold; };
    auto cycle_crossed = [&](const CycleRecord& c) {
        for (std::size_t s = c.start; s < c.end; ++s) {
            if (crosses(s)) return true;
        }
        return false;
    };
    for (std::size_t s = 0; s < phi.size(); ++s) {
        if (crosses(s)) {
            row.detection_sample = s;
            break;
        }
    }

    if (!truth) {
        for (const auto& c : cycles) {
            if (c.calibrating) continue;
            if (cycle_crossed(c)) {
                ++row.fp;
            } else {
                ++row.tn;
            }
        }
        return row;
    }

    const std::size_t onset = truth->onset_sample;
    row.onset_sample = onset;
    const auto oc = std::find_if(cycles.begin(), cycles.end(), [&](const CycleRecord& c) { return c.contains(onset); });
    if (oc == cycles.end()) {
        throw Error(ErrorCode::OnsetOutsideSegmentation,
                    "onset sample " + std::to_string(onset) + " is not inside a segmented cycle");
    }
    for (auto it = cycles.begin(); it != oc; ++it) {
        if (it->calibrating || it->end > oc->start) continue;
        if (cycle_crossed(*it)) {
            ++row.fp;
        } else {
            ++row.tn;
        }
    }

    // The band was not yet fitted when the perturbation started, so it cannot
    // have been seen.
    if (oc->calibrating) {
        ++row.fn;
        row.detection_sample.reset();
        return row;
    }

    const double duration = static_cast<double>(oc->length());
    const double window = tp_window_cycles * duration;
    row.detection_sample.reset();
    for (std::size_t s = onset; s < phi.size() && static_cast<double>(s - onset) <= window; ++s) {
        if (crosses(s)) {
            row.detection_sample = s;
            break;
        }
    }
    if (row.detection_sample) {
        ++row.tp;
        row.delay_pct = 100.0 * static_cast<double>(*row.detection_sample - onset) / duration;
    } else {
        ++row.fn;
    }
    return row;
}

std::string to_json_line(const Sample& sample) {
    std::string out;
    out.reserve(400);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "{\"i\":%zu,\"phase\":", sample.index);
    out += buf;
    auto number = [&](std::optional<double> v) {
        if (!v) {
            out += "null";
            return;
        }
        std::snprintf(buf, sizeof(buf), "%.9g", *v);
        out += buf;
    };
    number(sample.phase);
    out += ",\"phi\":";
    number(sample.phi);
    out += ",\"alpha\":[";
    for (std::size_t s = 0; s < kNumStates; ++s) {
        if (s) out.push_back(',');
        number(sample.alpha[s] == 0.0 ? 0.0 : sample.alpha[s]);
    }
    out += "],\"detected\":";
    out += sample.detected ? "true" : "false";
    out += "}";
    return out;
}

}  // namespace gaitpd::detector
