#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace prefforge {

inline constexpr int kCheckpointVersion = 1;
inline constexpr int kWorldVersion = 1;

// Precondition violations: bad shapes, out-of-range arguments, non-finite input.
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Invalid or infeasible configuration. Message names the failing field path.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sampling retry budget exhausted while building synthetic data.
struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gradient ascent produced a non-finite state.
struct RefinementError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or mismatched persisted file.
struct LoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw DomainError(msg);
}

inline void require_finite(double x, const std::string& what) {
    if (!std::isfinite(x)) throw DomainError(what + ": non-finite value");
}

}  // namespace prefforge
