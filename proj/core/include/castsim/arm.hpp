#pragma once

#include <array>
#include <vector>

#include "castsim/rng.hpp"
#include "castsim/string_model.hpp"

namespace castsim {

struct ArmConfig {
    std::array<double, 3> link_lengths{0.20, 0.20, 0.185};  // sums to 0.585 m
    std::array<std::array<double, 2>, 3> joint_limits{
        {{-2.6, 2.6}, {-2.6, 2.6}, {-2.6, 2.6}}};  // rad
    double joint_velocity_limit = 25.0;        // rad/s
    double joint_acceleration_limit = 600.0;   // rad/s^2
    double composite_speed_limit = 21.8;       // hand speed cap, m/s
    double command_period = 0.005;             // s
    Vec2 base_position{0.3, 0.3};
    double perturbation_fraction = 0.25;       // V_1..V_4 re-randomization scale

    double reach() const {
        return link_lengths[0] + link_lengths[1] + link_lengths[2];
    }
};

// Initial joint angles plus one degree-5 Bezier joint-velocity curve per
// joint over duration T. Control velocities V_0 and V_5 are pinned to zero.
struct MotionPlan {
    std::array<double, 3> initial_angles{};
    double duration = 0.0;  // T, s
    std::array<std::array<double, 6>, 3> control_velocities{};
};

using HandTrajectory = std::vector<TimedPose>;

// A realized plan: hand poses on the command grid plus the joint-space
// samples behind them (kept for collision checks and limit audits).
struct RealizedMotion {
    HandTrajectory hand;
    std::vector<std::array<double, 3>> joint_angles;
    std::vector<std::array<double, 3>> joint_velocities;
    double motion_duration = 0.0;  // T (tail excluded)
};

// Planar serial chain: position = base + sum L_j * (cos, sin) of cumulative
// angles; orientation = wrapped angle sum. Velocity fields left zero.
HandPose forward_kinematics(const std::array<double, 3>& angles,
                            const ArmConfig& config);

// Degree-5 Bezier through the six control values, evaluated by de Casteljau
// at u = t/T. Throws std::domain_error outside [0, T].
double bezier_velocity(const std::array<double, 6>& controls, double duration,
                       double t);

// Exact running integral of the curve: T * sum_k V_k * I_k(u) with
// I_k(u) = (1/6) * sum_{j>k} B_{j,6}(u).
double bezier_velocity_integral(const std::array<double, 6>& controls,
                                double duration, double t);

// Random plan: initial angles uniform in the joint range, T uniform in
// t_range, control velocity V_n = alpha_n * T/5 with alpha_n uniform in the
// acceleration range. No validity guarantee; realize_trajectory validates.
MotionPlan generate_motion(Rng& rng, const ArmConfig& config,
                           const std::array<double, 2>& t_range = {0.2, 1.5});

// Second-and-later iterations: keep the initial pose, nudge T by up to a
// quarter of the t_range width (clamped) and V_1..V_4 by
// perturbation_fraction of their original sampling half-range.
MotionPlan perturb_motion(const MotionPlan& prev, Rng& rng, int iteration,
                          const ArmConfig& config,
                          const std::array<double, 2>& t_range = {0.2, 1.5});

// Samples the plan on the command grid (motion then a stationary tail),
// integrating joint angles exactly and mapping through forward kinematics;
// hand velocity comes from the Jacobian. Every sample is checked against
// joint, joint-velocity, and composite-speed limits.
// Throws LimitViolationError naming the first offending sample.
RealizedMotion realize_trajectory(const MotionPlan& plan, const ArmConfig& config,
                                  double tail_s = 0.4);

}  // namespace castsim
