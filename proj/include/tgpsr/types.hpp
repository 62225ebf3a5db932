#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace tgpsr {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

// All randomness in a run flows from one of these.
using Rng = std::mt19937_64;

struct Position {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Position&, const Position&) = default;
    friend Position operator+(Position a, Position b) { return {a.x + b.x, a.y + b.y}; }
    friend Position operator-(Position a, Position b) { return {a.x - b.x, a.y - b.y}; }
    friend Position operator*(double k, Position a) { return {k * a.x, k * a.y}; }
};

inline double distance_sq(Position a, Position b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

inline double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

enum class ErrorCode {
    invalid_argument,
    invalid_geometry,
    precondition,
    incomplete_information,
    invalid_spec,
    invalid_input,
    parse,
    io,
    internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace tgpsr
