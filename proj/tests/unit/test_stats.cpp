#include "doctest.h"
#include "gaitpd/stats.hpp"

#include <random>
#include <sstream>

using namespace gaitpd;
using namespace gaitpd::stats;

namespace {

CycleMatrix constant_cycle(double v, std::size_t bins = 100) {
    StateVector row;
    row.fill(v);
    return CycleMatrix(bins, row);
}

CycleMatrix random_cycle(std::mt19937_64& rng, std::size_t bins = 100) {
    std::normal_distribution<double> d(1.0, 0.3);
    CycleMatrix m(bins);
    for (auto& row : m) {
        for (auto& v : row) v = d(rng);
    }
    return m;
}

}  // namespace

TEST_CASE("coefficient_of_variation") {
    CHECK(coefficient_of_variation(1.0, 0.1) == doctest::Approx(0.1));
    CHECK(coefficient_of_variation(0.0, 0.1, 1e-6) == doctest::Approx(1e5));
    // |mean| convention: 0.1 / |-0.5|
    CHECK(std::abs(coefficient_of_variation(-0.5, 0.1) - 0.2) <= 1e-12);
}

TEST_CASE("ten identical constant cycles give zero spread") {
    PhaseBandModel m;
    for (int i = 0; i < 10; ++i) m.push_cycle(constant_cycle(2.0));
    CHECK(m.valid());
    for (std::size_t b = 0; b < 100; ++b) {
        for (std::size_t s = 0; s < kNumStates; ++s) {
            CHECK(m.mean(b)[s] == 2.0);
            CHECK(m.sd(b)[s] == 0.0);
            CHECK(m.cov(b)[s] == 0.0);
        }
    }
}

TEST_CASE("standard deviation uses the population formula") {
    PhaseBandModel m(2, 4);
    m.push_cycle(constant_cycle(1.0, 4));
    m.push_cycle(constant_cycle(3.0, 4));
    // mean 2, deviations +-1, divided by N = 2
    CHECK(m.mean(1)[5] == 2.0);
    CHECK(m.sd(1)[5] == 1.0);
    CHECK(m.cov(1)[5] == 0.5);
}

TEST_CASE("the eleventh push evicts the oldest cycle") {
    std::mt19937_64 rng(3);
    std::vector<CycleMatrix> cycles;
    for (int i = 0; i < 11; ++i) cycles.push_back(random_cycle(rng));
    PhaseBandModel all;
    for (const auto& c : cycles) all.push_cycle(c);
    PhaseBandModel last_ten;
    for (std::size_t i = 1; i < cycles.size(); ++i) last_ten.push_cycle(cycles[i]);
    CHECK(all.statistics().mean == last_ten.statistics().mean);
    CHECK(all.statistics().sd == last_ten.statistics().sd);
    CHECK(all.statistics().cov == last_ten.statistics().cov);
    CHECK(all.window().size() == 10);
}

TEST_CASE("the model is a pure function of its window") {
    std::mt19937_64 rng(8);
    std::vector<CycleMatrix> cycles;
    for (int i = 0; i < 25; ++i) cycles.push_back(random_cycle(rng));
    PhaseBandModel m;
    for (const auto& c : cycles) m.push_cycle(c);
    const auto direct = summarize(std::span(cycles).subspan(15), 100, kDefaultEpsilon);
    CHECK(direct.mean == m.statistics().mean);
    CHECK(direct.sd == m.statistics().sd);
}

TEST_CASE("scaling a state scales mean and sd and keeps the CoV") {
    std::mt19937_64 rng(12);
    std::vector<CycleMatrix> base;
    for (int i = 0; i < 10; ++i) base.push_back(random_cycle(rng, 20));
    for (double k : {0.5, 3.0, 17.0}) {
        auto scaled = base;
        for (auto& c : scaled) {
            for (auto& row : c) {
                for (auto& v : row) v *= k;
            }
        }
        const auto a = summarize(base, 20, kDefaultEpsilon);
        const auto b = summarize(scaled, 20, kDefaultEpsilon);
        for (std::size_t bin = 0; bin < 20; ++bin) {
            for (std::size_t s = 0; s < kNumStates; ++s) {
                CHECK(b.mean[bin][s] == doctest::Approx(k * a.mean[bin][s]).epsilon(1e-12));
                CHECK(b.sd[bin][s] == doctest::Approx(k * a.sd[bin][s]).epsilon(1e-12));
                CHECK(b.cov[bin][s] == doctest::Approx(a.cov[bin][s]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("push_cycle rejects a cycle of the wrong size") {
    PhaseBandModel m;
    CHECK_THROWS_AS(m.push_cycle(constant_cycle(1.0, 50)), Error);
}

TEST_CASE("dump_csv writes one row per bin and state") {
    PhaseBandModel m(1, 3);
    m.push_cycle(constant_cycle(1.5, 3));
    std::ostringstream out;
    m.dump_csv(out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "bin,state,mean,sd,cov");
    std::getline(in, line);
    CHECK(line == "0,rheel_rel_com_x,1.5,0,0");
    int rows = 1;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3 * 16);
}
