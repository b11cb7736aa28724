#include "gaitpd/baseline_wbam.hpp"

#include <algorithm>
#include <cmath>

namespace gaitpd::baseline {

void BaselineConfig::validate() const {
    if (history_cycles < 3 || history_cycles > 5) {
        throw Error(ErrorCode::InvalidConfig, "WBAM history must span 3 to 5 cycles");
    }
    if (!(k > 0.0)) throw Error(ErrorCode::InvalidConfig, "WBAM band multiplier must be positive");
    if (!(tp_window_cycles > 0.0)) throw Error(ErrorCode::InvalidConfig, "tp_window_cycles must be positive");
}

ChannelBand fit_channel(std::span<const double> wbam, std::span<const gait::GaitCycle> cycles,
                        std::size_t n_cycles, std::size_t before_sample) {
    if (n_cycles == 0) throw Error(ErrorCode::InvalidConfig, "n_cycles must be positive");
    std::vector<const gait::GaitCycle*> eligible;
    for (const auto& c : cycles) {
        if (c.end <= before_sample) eligible.push_back(&c);
    }
    if (eligible.size() < n_cycles) {
        throw Error(ErrorCode::InsufficientHistory, std::to_string(eligible.size()) +
                                                        " complete cycles available, " + std::to_string(n_cycles) +
                                                        " needed");
    }
    const auto first = eligible.end() - static_cast<std::ptrdiff_t>(n_cycles);
    double sum = 0.0;
    std::size_t count = 0;
    for (auto it = first; it != eligible.end(); ++it) {
        if ((*it)->end > wbam.size()) throw Error(ErrorCode::OutOfRange, "cycle beyond the WBAM channel");
        for (std::size_t s = (*it)->start; s < (*it)->end; ++s) {
            sum += wbam[s];
            ++count;
        }
    }
    const double mean = sum / static_cast<double>(count);
    double sq = 0.0;
    for (auto it = first; it != eligible.end(); ++it) {
        for (std::size_t s = (*it)->start; s < (*it)->end; ++s) sq += (wbam[s] - mean) * (wbam[s] - mean);
    }
    return {mean, std::sqrt(sq / static_cast<double>(count))};
}

WbamBand fit_band(std::span<const double> sagittal, std::span<const double> frontal,
                  std::span<const gait::GaitCycle> cycles, std::size_t n_cycles, std::size_t before_sample,
                  double k) {
    WbamBand band;
    band.sagittal = fit_channel(sagittal, cycles, n_cycles, before_sample);
    band.frontal = fit_channel(frontal, cycles, n_cycles, before_sample);
    band.history_cycles = n_cycles;
    band.k = k;
    return band;
}

bool outside(double value, const ChannelBand& band, double k) noexcept {
    const double half = k * band.sd;
    return value < band.mean - half || value > band.mean + half;
}

std::optional<std::size_t> detect_channel(std::span<const double> wbam, const ChannelBand& band, double k,
                                          std::size_t from_sample) {
    for (std::size_t s = from_sample; s < wbam.size(); ++s) {
        if (outside(wbam[s], band, k)) return s;
    }
    return std::nullopt;
}

std::optional<std::size_t> detect_wbam(std::span<const double> sagittal, std::span<const double> frontal,
                                       const WbamBand& band, std::size_t from_sample) {
    const std::size_t n = std::min(sagittal.size(), frontal.size());
    for (std::size_t s = from_sample; s < n; ++s) {
        if (outside(sagittal[s], band.sagittal, band.k) || outside(frontal[s], band.frontal, band.k)) return s;
    }
    return std::nullopt;
}

BaselineResult evaluate_trial(const ingest::TrialRecording& trial, const BaselineConfig& config) {
    config.validate();
    trial.validate();
    if (!trial.has_wbam()) throw Error(ErrorCode::MalformedHeader, trial.trial_id + " has no WBAM channels");
    const auto& sag = *trial.wbam_sagittal;
    const auto& front = *trial.wbam_frontal;

    const auto events = gait::detect_heel_strikes(trial.grf_right_z, trial.sample_rate, config.heel_strike);
    const auto seg = gait::segment_and_phase(events, trial.size(), trial.sample_rate, config.plausibility);

    std::size_t eval_cycle = config.reference_cycle;
    if (trial.perturbation) {
        const auto c = seg.cycle_of(trial.perturbation->onset_sample);
        if (!c) {
            throw Error(ErrorCode::OnsetOutsideSegmentation,
                        "onset sample " + std::to_string(trial.perturbation->onset_sample) +
                            " is not inside a segmented cycle");
        }
        eval_cycle = *c;
    }
    if (eval_cycle >= seg.cycles.size()) {
        throw Error(ErrorCode::InsufficientHistory, "trial too short for the reference cycle");
    }
    const std::size_t eval_start = seg.cycles[eval_cycle].start;

    BaselineResult result;
    result.band = fit_band(sag, front, seg.cycles, config.history_cycles, eval_start, config.k);

    std::vector<detector::CycleRecord> cycles;
    cycles.reserve(seg.cycles.size());
    for (std::size_t i = 0; i < seg.cycles.size(); ++i) {
        detector::CycleRecord rec;
        rec.start = seg.cycles[i].start;
        rec.end = seg.cycles[i].end;
        rec.plausible = seg.cycles[i].plausible;
        rec.calibrating = i < eval_cycle;
        cycles.push_back(rec);
    }

    auto indicator = [&](auto&& is_out) {
        std::vector<std::optional<double>> trace(trial.size(), std::nullopt);
        for (std::size_t s = eval_start; s < trial.size(); ++s) trace[s] = is_out(s) ? 1.0 : 0.0;
        return trace;
    };
    auto row_for = [&](const std::vector<std::optional<double>>& trace, const std::string& suffix) {
        auto row = detector::classify_and_delay(trace, cycles, trial.perturbation, 0.5, config.tp_window_cycles);
        row.trial_id = trial.trial_id + suffix;
        return row;
    };

    if (config.mode == CombineMode::either_plane) {
        const auto trace = indicator([&](std::size_t s) {
            return outside(sag[s], result.band.sagittal, config.k) || outside(front[s], result.band.frontal, config.k);
        });
        result.rows.push_back(row_for(trace, ""));
    } else {
        result.rows.push_back(
            row_for(indicator([&](std::size_t s) { return outside(sag[s], result.band.sagittal, config.k); }),
                    ":sagittal"));
        result.rows.push_back(
            row_for(indicator([&](std::size_t s) { return outside(front[s], result.band.frontal, config.k); }),
                    ":frontal"));
    }
    return result;
}

}  // namespace gaitpd::baseline
