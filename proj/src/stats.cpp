#include "gaitpd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace gaitpd::stats {

double coefficient_of_variation(double mean, double sd, double epsilon) {
    return sd / std::max(std::abs(mean), epsilon);
}

BandStatistics summarize(std::span<const CycleMatrix> window, std::size_t bins, double epsilon) {
    BandStatistics out;
    out.mean.assign(bins, StateVector{});
    out.sd.assign(bins, StateVector{});
    out.cov.assign(bins, StateVector{});
    if (window.empty()) return out;
    const double n = static_cast<double>(window.size());
    for (std::size_t b = 0; b < bins; ++b) {
        for (std::size_t s = 0; s < kNumStates; ++s) {
            double sum = 0.0;
            for (const auto& m : window) sum += m[b][s];
            const double mean = sum / n;
            double sq = 0.0;
            for (const auto& m : window) {
                const double d = m[b][s] - mean;
                sq += d * d;
            }
            const double sd = std::sqrt(sq / n);
            out.mean[b][s] = mean;
            out.sd[b][s] = sd;
            out.cov[b][s] = coefficient_of_variation(mean, sd, epsilon);
        }
    }
    return out;
}

PhaseBandModel::PhaseBandModel(std::size_t window_cycles, std::size_t bins, double epsilon)
    : window_cycles_(window_cycles), bins_(bins), epsilon_(epsilon) {
    if (window_cycles_ == 0) throw Error(ErrorCode::InvalidConfig, "window_cycles must be positive");
    if (bins_ < 2) throw Error(ErrorCode::InvalidConfig, "bins must be at least 2");
    if (!(epsilon_ > 0.0)) throw Error(ErrorCode::InvalidConfig, "epsilon must be positive");
    window_.reserve(window_cycles_ + 1);
    stats_ = summarize({}, bins_, epsilon_);
}

void PhaseBandModel::push_cycle(CycleMatrix cycle) {
    if (cycle.size() != bins_) {
        throw Error(ErrorCode::DimensionMismatch, "cycle has " + std::to_string(cycle.size()) +
                                                      " bins, model expects " + std::to_string(bins_));
    }
    window_.push_back(std::move(cycle));
    if (window_.size() > window_cycles_) window_.erase(window_.begin());
    stats_ = summarize(window_, bins_, epsilon_);
}

void PhaseBandModel::dump_csv(std::ostream& out) const {
    out << "bin,state,mean,sd,cov\n";
    char buf[128];
    for (std::size_t b = 0; b < bins_; ++b) {
        for (std::size_t s = 0; s < kNumStates; ++s) {
            std::snprintf(buf, sizeof(buf), "%zu,%s,%.9g,%.9g,%.9g\n", b, kStateNames[s].data(),
                          stats_.mean[b][s], stats_.sd[b][s], stats_.cov[b][s]);
            out << buf;
        }
    }
}

}  // namespace gaitpd::stats
