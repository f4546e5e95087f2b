#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace castsim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Integrator produced a non-finite or runaway state; dt too large for the
// sampled stiffness.
struct DivergenceError : Error {
    DivergenceError(std::int64_t step, double time)
        : Error("simulation diverged at step " + std::to_string(step) +
                " (t=" + std::to_string(time) + " s)"),
          step_index(step),
          time_s(time) {}
    std::int64_t step_index;
    double time_s;
};

struct InvalidStateError : Error {
    using Error::Error;
};

// A realized trajectory sample breaks a joint, velocity, or hand-speed limit.
struct LimitViolationError : Error {
    LimitViolationError(const std::string& what_limit, int joint, double time)
        : Error("limit violation: " + what_limit +
                (joint >= 0 ? " (joint " + std::to_string(joint) + ")" : "") +
                " at t=" + std::to_string(time) + " s"),
          limit_name(what_limit),
          joint_index(joint),
          time_s(time) {}
    std::string limit_name;
    int joint_index;  // -1 when not joint-specific
    double time_s;
};

struct FrameOutOfViewError : Error {
    using Error::Error;
};

struct TipNotFoundError : Error {
    using Error::Error;
};

struct AlignmentError : Error {
    using Error::Error;
};

struct GenerationFailedError : Error {
    using Error::Error;
};

struct EstimationFailedError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace castsim
