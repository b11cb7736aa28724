#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "gaitpd/types.hpp"

namespace gaitpd::stats {

inline constexpr double kDefaultEpsilon = 1e-6;

/// Coefficient of variation sd / |mean|, with |mean| floored at epsilon so
/// that states whose mean crosses zero stay finite.
double coefficient_of_variation(double mean, double sd, double epsilon = kDefaultEpsilon);

/// Per phase bin and state: mean, population standard deviation, CoV.
struct BandStatistics {
    std::vector<StateVector> mean;
    std::vector<StateVector> sd;
    std::vector<StateVector> cov;
};

/// Statistics over a set of cycle matrices, accumulated in the given order.
/// Both the streaming model and the batch pipeline go through this.
BandStatistics summarize(std::span<const CycleMatrix> window, std::size_t bins, double epsilon);

/// Rolling per-phase band model over the most recent `window_cycles` cycles.
class PhaseBandModel {
public:
    explicit PhaseBandModel(std::size_t window_cycles = 10, std::size_t bins = 100,
                            double epsilon = kDefaultEpsilon);

    /// Appends a cycle, dropping the oldest when the window overflows, and
    /// recomputes the statistics from the window contents.
    void push_cycle(CycleMatrix cycle);

    /// True once the window holds window_cycles cycles.
    bool valid() const noexcept { return window_.size() == window_cycles_; }

    std::size_t size() const noexcept { return window_.size(); }
    std::size_t window_cycles() const noexcept { return window_cycles_; }
    std::size_t bins() const noexcept { return bins_; }
    double epsilon() const noexcept { return epsilon_; }

    const StateVector& mean(std::size_t bin) const { return stats_.mean.at(bin); }
    const StateVector& sd(std::size_t bin) const { return stats_.sd.at(bin); }
    const StateVector& cov(std::size_t bin) const { return stats_.cov.at(bin); }
    const BandStatistics& statistics() const noexcept { return stats_; }
    const std::vector<CycleMatrix>& window() const noexcept { return window_; }

    /// CSV with columns bin,state,mean,sd,cov.
    void dump_csv(std::ostream& out) const;

private:
    std::size_t window_cycles_;
    std::size_t bins_;
    double epsilon_;
    std::vector<CycleMatrix> window_;  // oldest first
    BandStatistics stats_;
};

}  // namespace gaitpd::stats
