#pragma once

#include <vector>

#include "castsim/vec2.hpp"

namespace castsim {

constexpr Vec2 kStandardGravity{0.0, -9.81};

// The eight unit-mass-normalized string coefficients. Dividing the equation
// of motion by the point mass leaves these as the only free parameters.
struct StringParams {
    double k_s = 0.0;   // segment spring stiffness        [N/m/kg]
    double c_s = 0.0;   // segment damping                  [N.s/m/kg]
    double k_h = 0.0;   // interior hinge spring            [N.m/rad/kg]
    double c_h = 0.0;   // interior hinge damping           [N.m.s/rad/kg]
    double c_c1 = 0.0;  // air drag, linear term
    double c_c2 = 0.0;  // air drag, squared term
    double k_ph = 0.0;  // grasp hinge spring               [N.m/rad/kg]
    double c_ph = 0.0;  // grasp hinge damping              [N.m.s/rad/kg]

    bool all_positive() const {
        return k_s > 0 && c_s > 0 && k_h > 0 && c_h > 0 && c_c1 > 0 &&
               c_c2 > 0 && k_ph > 0 && c_ph > 0;
    }
};

struct StringGeometry {
    int n = 10;                 // mass points, >= 3 (>= 2 for degenerate tests)
    double total_length = 0.3;  // [m]

    double rest_length() const { return total_length / (n - 1); }
};

// Positions/velocities of the n mass points at one instant. Index 0 is the
// grasped point and is kinematically driven by the hand.
struct StringState {
    std::vector<Vec2> positions;
    std::vector<Vec2> velocities;
    double time = 0.0;

    int n() const { return static_cast<int>(positions.size()); }
};

struct HandPose {
    Vec2 position;
    double orientation = 0.0;  // hand axis direction, wrapped to (-pi, pi]
    Vec2 velocity;
    double angular_velocity = 0.0;
};

// Plant-side hook: multiplies each interior hinge torque by
// (1 + kappa * bend^2). Zero kappa reproduces the linear model.
struct SimOptions {
    double hinge_stiffening_kappa = 0.0;
};

// Sum of the per-point forces (per unit mass): segment springs and dampers,
// interior hinge couples, air drag, gravity, and the grasp hinge couple
// between the hand axis and the first segment. Point 0's entry is computed
// for force symmetry but ignored by the integrator.
std::vector<Vec2> net_accelerations(const StringState& state,
                                    const StringParams& params,
                                    const StringGeometry& geometry,
                                    const HandPose& hand,
                                    const Vec2& gravity = kStandardGravity,
                                    const SimOptions& options = {});

// One explicit Euler step (velocity first, position with the updated
// velocity) for points 1..n-1; point 0 is overwritten from hand_next.
StringState euler_step(const StringState& state, const StringParams& params,
                       const StringGeometry& geometry, const HandPose& hand_now,
                       const HandPose& hand_next, double dt,
                       const Vec2& gravity = kStandardGravity,
                       const SimOptions& options = {});

struct TimedPose {
    double time = 0.0;
    HandPose pose;
};

struct TimedState {
    double time = 0.0;
    StringState state;
};

// Integrates the string over the given hand trajectory, stepping internally
// at dt (snapped so an integer number of substeps covers each command
// interval) and emitting one state per hand sample. Hand pose is interpolated
// linearly (shortest arc for orientation) inside each interval. Deterministic.
//
// Throws DivergenceError when the state stops being finite or runs away.
std::vector<TimedState> simulate_rollout(const StringParams& params,
                                         const StringGeometry& geometry,
                                         const std::vector<TimedPose>& hand_trajectory,
                                         const StringState& initial,
                                         double dt,
                                         const Vec2& gravity = kStandardGravity,
                                         const SimOptions& options = {});

// Canonical pre-motion state: straight vertical hang below the grasp with the
// analytic per-segment gravity stretch, zero velocities. Segment j (0-based)
// carries n-1-j points, so its extension is g*(n-1-j)/k_s.
StringState init_hanging_state(const HandPose& grasp,
                               const StringGeometry& geometry,
                               const StringParams& params,
                               const Vec2& gravity = kStandardGravity);

}  // namespace castsim
