#include "doctest.h"
#include "gaitpd/types.hpp"

#include <cmath>

using namespace gaitpd;

TEST_CASE("state names and indices round-trip in canonical order") {
    for (std::size_t i = 0; i < kNumStates; ++i) {
        const auto found = state_index(kStateNames[i]);
        REQUIRE(found.has_value());
        CHECK(*found == i);
    }
    CHECK(idx(StateIndex::rheel_rel_com_x) == 0);
    CHECK(idx(StateIndex::com_rel_midfeet_y) == 7);
    CHECK(idx(StateIndex::com_vel_y) == 15);
    CHECK_FALSE(state_index("pelvis_tilt").has_value());
}

TEST_CASE("perturbation kinds and directions parse their own names") {
    for (auto k : {PerturbationKind::trip, PerturbationKind::slip, PerturbationKind::translation}) {
        CHECK(parse_perturbation_kind(to_string(k)) == k);
    }
    for (auto d : kAllDirections) CHECK(parse_direction(to_string(d)) == d);
    CHECK_THROWS_AS(parse_direction("up"), Error);
    CHECK_THROWS_AS(parse_perturbation_kind("stumble"), Error);
}

TEST_CASE("direction unit vectors have unit length and follow the compass") {
    for (auto d : kAllDirections) {
        const auto u = direction_unit(d);
        CHECK(std::hypot(u[0], u[1]) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(direction_unit(Direction::N)[0] == doctest::Approx(1.0));
    CHECK(direction_unit(Direction::W)[1] == doctest::Approx(1.0));
    CHECK(direction_unit(Direction::E)[1] == doctest::Approx(-1.0));
}

TEST_CASE("errors carry their code") {
    try {
        throw Error(ErrorCode::GapAtBoundary, "x");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::GapAtBoundary);
        CHECK(std::string(e.what()).find("GapAtBoundary") != std::string::npos);
    }
}
