#include "gaitpd/types.hpp"

#include <cmath>

namespace gaitpd {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedHeader: return "MalformedHeader";
        case ErrorCode::RaggedRows: return "RaggedRows";
        case ErrorCode::BadCell: return "BadCell";
        case ErrorCode::NonFiniteForce: return "NonFiniteForce";
        case ErrorCode::BadTimestamps: return "BadTimestamps";
        case ErrorCode::GapAtBoundary: return "GapAtBoundary";
        case ErrorCode::MissingMarker: return "MissingMarker";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::InsufficientEvents: return "InsufficientEvents";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::OnsetOutsideSegmentation: return "OnsetOutsideSegmentation";
        case ErrorCode::InsufficientHistory: return "InsufficientHistory";
        case ErrorCode::EmptyTrialSet: return "EmptyTrialSet";
        case ErrorCode::EmptyRows: return "EmptyRows";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::DegenerateAllConstant: return "DegenerateAllConstant";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

std::optional<std::size_t> state_index(std::string_view name) {
    for (std::size_t i = 0; i < kNumStates; ++i) {
        if (kStateNames[i] == name) return i;
    }
    return std::nullopt;
}

std::string_view to_string(PerturbationKind kind) {
    switch (kind) {
        case PerturbationKind::trip: return "trip";
        case PerturbationKind::slip: return "slip";
        case PerturbationKind::translation: return "translation";
    }
    return "trip";
}

PerturbationKind parse_perturbation_kind(std::string_view text) {
    if (text == "trip") return PerturbationKind::trip;
    if (text == "slip") return PerturbationKind::slip;
    if (text == "translation") return PerturbationKind::translation;
    throw Error(ErrorCode::InvalidSpec, "unknown perturbation kind '" + std::string(text) + "'");
}

namespace {
constexpr std::array<std::string_view, 8> kDirectionNames = {"N", "NE", "E", "SE", "S", "SW", "W", "NW"};
}

std::string_view to_string(Direction d) { return kDirectionNames[static_cast<std::size_t>(d)]; }

Direction parse_direction(std::string_view text) {
    for (std::size_t i = 0; i < kDirectionNames.size(); ++i) {
        if (kDirectionNames[i] == text) return static_cast<Direction>(i);
    }
    throw Error(ErrorCode::InvalidSpec, "unknown direction '" + std::string(text) + "'");
}

std::array<double, 2> direction_unit(Direction d) {
    const double s = std::sqrt(0.5);
    switch (d) {
        case Direction::N: return {1.0, 0.0};
        case Direction::NE: return {s, -s};
        case Direction::E: return {0.0, -1.0};
        case Direction::SE: return {-s, -s};
        case Direction::S: return {-1.0, 0.0};
        case Direction::SW: return {-s, s};
        case Direction::W: return {0.0, 1.0};
        case Direction::NW: return {s, s};
    }
    return {1.0, 0.0};
}

}  // namespace gaitpd
