#include "doctest.h"
#include "fixtures.hpp"
#include "gaitpd/baseline_wbam.hpp"
#include "gaitpd/synth.hpp"

#include <random>

using namespace gaitpd;
using namespace gaitpd::baseline;

namespace {

std::vector<gait::GaitCycle> even_cycles(std::size_t count, std::size_t len) {
    std::vector<gait::GaitCycle> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back({i * len, (i + 1) * len, len / 100.0, true});
    return out;
}

}  // namespace

TEST_CASE("fit_channel") {
    const auto cycles = even_cycles(5, 100);
    SUBCASE("constant channel") {
        const std::vector<double> w(600, 0.02);
        const auto b = fit_channel(w, cycles, 3, 500);
        CHECK(b.mean == doctest::Approx(0.02));
        CHECK(b.sd == doctest::Approx(0.0));
    }
    SUBCASE("alternating +-1") {
        std::vector<double> w(600);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = i % 2 == 0 ? 1.0 : -1.0;
        const auto b = fit_channel(w, cycles, 3, 500);
        // 150 samples at +1 and 150 at -1: mean 0, population sd 1
        CHECK(std::abs(b.mean) <= 1e-12);
        CHECK(std::abs(b.sd - 1.0) <= 1e-12);
    }
    SUBCASE("uses the last n cycles ending before the sample") {
        std::vector<double> w(600, 0.0);
        for (std::size_t i = 200; i < 300; ++i) w[i] = 9.0;
        const auto b = fit_channel(w, cycles, 3, 300);
        CHECK(b.mean == doctest::Approx(3.0));
    }
    SUBCASE("not enough history") {
        const std::vector<double> w(600, 0.0);
        try {
            fit_channel(w, cycles, 3, 250);
            FAIL("expected InsufficientHistory");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InsufficientHistory);
        }
    }
}

TEST_CASE("detect_channel and detect_wbam") {
    const ChannelBand unit{0.0, 1.0};
    std::vector<double> w(50, 0.0);
    w[20] = 4.5;
    CHECK(detect_channel(w, unit, 4.0, 0) == std::optional<std::size_t>(20));
    CHECK_FALSE(detect_channel(w, unit, 4.0, 21).has_value());

    std::vector<double> calm(50, 3.9);
    CHECK_FALSE(detect_channel(calm, unit, 4.0, 0).has_value());

    std::vector<double> sag(1000, 0.5), front(1000, -0.5);
    front[812] = 5.0;
    WbamBand band;
    band.sagittal = unit;
    band.frontal = unit;
    CHECK(detect_wbam(sag, front, band, 0) == std::optional<std::size_t>(812));
}

TEST_CASE("a zero-width band fires on any deviation but not on the mean") {
    const ChannelBand flat{0.3, 0.0};
    CHECK_FALSE(outside(0.3, flat, 4.0));
    CHECK(outside(0.3000001, flat, 4.0));
}

TEST_CASE("detection is unchanged by an affine rescaling of the channel") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    const auto cycles = even_cycles(6, 100);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> w(700);
        for (auto& v : w) v = n(rng);
        w[500 + static_cast<std::size_t>(t)] = 9.0;
        const double a = (t % 2 == 0 ? 1.0 : -1.0) * (0.1 + t * 0.37);
        const double b = t * 1.7 - 40.0;
        std::vector<double> y(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) y[i] = a * w[i] + b;
        const auto bx = fit_channel(w, cycles, 4, 500);
        const auto by = fit_channel(y, cycles, 4, 500);
        CHECK(detect_channel(w, bx, 4.0, 500) == detect_channel(y, by, 4.0, 500));
    }
}

TEST_CASE("evaluate_trial on synthetic trials") {
    synth::PerturbationSpec trip;
    trip.magnitude = 4.5;
    const auto perturbed = synth::generate_trial(fixtures::quiet_params(61), trip, "p");
    const auto steady = synth::generate_trial(fixtures::quiet_params(62), std::nullopt, "s");

    const auto r = evaluate_trial(perturbed);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].total() == 1);
    CHECK(r.band.history_cycles == 3);

    const auto s = evaluate_trial(steady);
    CHECK(s.rows[0].tp + s.rows[0].fn == 0);
    CHECK(s.rows[0].tn + s.rows[0].fp > 0);

    BaselineConfig per_plane;
    per_plane.mode = CombineMode::per_plane_average;
    const auto pp = evaluate_trial(perturbed, per_plane);
    REQUIRE(pp.rows.size() == 2);
    CHECK(pp.rows[0].trial_id == "p:sagittal");
    CHECK(pp.rows[1].trial_id == "p:frontal");

    BaselineConfig bad;
    bad.history_cycles = 6;
    CHECK_THROWS_AS(evaluate_trial(perturbed, bad), Error);

    auto no_wbam = steady;
    no_wbam.wbam_sagittal.reset();
    no_wbam.wbam_frontal.reset();
    CHECK_THROWS_AS(evaluate_trial(no_wbam), Error);
}
