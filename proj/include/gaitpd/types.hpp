#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gaitpd {

enum class ErrorCode {
    MalformedHeader,
    RaggedRows,
    BadCell,
    NonFiniteForce,
    BadTimestamps,
    GapAtBoundary,
    MissingMarker,
    TooShort,
    InsufficientEvents,
    OutOfRange,
    DimensionMismatch,
    InvalidConfig,
    InvalidSpec,
    OnsetOutsideSegmentation,
    InsufficientHistory,
    EmptyTrialSet,
    EmptyRows,
    TooFewSamples,
    DegenerateAllConstant,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI, the Python module) can map them without parsing text.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Missing marker coordinates are stored as quiet NaN.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) noexcept { return std::isnan(v); }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;

    double& operator[](std::size_t axis) { return axis == 0 ? x : (axis == 1 ? y : z); }
    double operator[](std::size_t axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
};

// Canonical 16-state ordering shared by every module. Heel states are heel
// minus COM, the COM states are relative to the horizontal mid-point of the
// heels, velocities are of global positions unless configured otherwise.
inline constexpr std::size_t kNumStates = 16;
inline constexpr std::size_t kNumPositionStates = 8;

enum class StateIndex : std::size_t {
    rheel_rel_com_x,
    rheel_rel_com_y,
    rheel_rel_com_z,
    lheel_rel_com_x,
    lheel_rel_com_y,
    lheel_rel_com_z,
    com_rel_midfeet_x,
    com_rel_midfeet_y,
    rheel_vel_x,
    rheel_vel_y,
    rheel_vel_z,
    lheel_vel_x,
    lheel_vel_y,
    lheel_vel_z,
    com_vel_x,
    com_vel_y,
};

inline constexpr std::array<std::string_view, kNumStates> kStateNames = {
    "rheel_rel_com_x", "rheel_rel_com_y", "rheel_rel_com_z",
    "lheel_rel_com_x", "lheel_rel_com_y", "lheel_rel_com_z",
    "com_rel_midfeet_x", "com_rel_midfeet_y",
    "rheel_vel_x", "rheel_vel_y", "rheel_vel_z",
    "lheel_vel_x", "lheel_vel_y", "lheel_vel_z",
    "com_vel_x", "com_vel_y",
};

constexpr std::size_t idx(StateIndex s) noexcept { return static_cast<std::size_t>(s); }

/// Looks a state up by its canonical name; nullopt when unknown.
std::optional<std::size_t> state_index(std::string_view name);

using StateVector = std::array<double, kNumStates>;

/// One gait cycle resampled onto the phase grid: row b holds the 16 states at
/// phase b * 100 / bins percent.
using CycleMatrix = std::vector<StateVector>;

enum class PerturbationKind { trip, slip, translation };

std::string_view to_string(PerturbationKind kind);
PerturbationKind parse_perturbation_kind(std::string_view text);

// Compass directions in the horizontal plane; N is +x (walking direction),
// W is +y (left).
enum class Direction { N, NE, E, SE, S, SW, W, NW };

inline constexpr std::array<Direction, 8> kAllDirections = {
    Direction::N, Direction::NE, Direction::E, Direction::SE,
    Direction::S, Direction::SW, Direction::W, Direction::NW};

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view text);
/// Unit vector (x, y) for a compass direction.
std::array<double, 2> direction_unit(Direction d);

struct PerturbationLabel {
    std::size_t onset_sample = 0;
    PerturbationKind kind = PerturbationKind::trip;
    std::optional<Direction> direction;
    double magnitude = 0.0;

    friend bool operator==(const PerturbationLabel&, const PerturbationLabel&) = default;
};

}  // namespace gaitpd
