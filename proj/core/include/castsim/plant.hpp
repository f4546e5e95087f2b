#pragma once

#include <optional>

#include "castsim/arm.hpp"
#include "castsim/estimation.hpp"
#include "castsim/observation.hpp"

namespace castsim {

enum class MismatchMode { none, geometry, stiffening };

// The "actual string": parameters are hidden from the learner, which sees
// only rendered frames, the executed hand trajectory, and judge verdicts.
struct PlantConfig {
    StringParams hidden_params;
    StringGeometry plant_geometry;
    MismatchMode mismatch_mode = MismatchMode::none;
    double stiffening_kappa = 0.5;  // used by MismatchMode::stiffening
};

struct TargetSpec {
    double x_ref = 0.0;  // m
    double y_ref = 0.0;  // m
    double w = 0.02;     // allowable half-error in x
    double h = 0.04;     // allowable half-error in y
};

struct ObstacleSpec {
    bool present = false;
    Vec2 corner;  // lower-left, m
    double width = 0.0;
    double height = 0.0;
};

struct TimedPoint {
    double time = 0.0;
    Vec2 point;
};

// Everything one manipulation produces. Estimation may consume frames and
// hand only; plant_states back the collision judge and overlay plots, and
// tip backs the success judge.
struct ManipulationRecord {
    FrameSeries frames;
    std::vector<TimedPoint> tip;  // true tip on the command grid
    HandTrajectory hand;
    std::vector<TimedState> plant_states;
    std::vector<std::array<double, 3>> joint_angles;
};

// Realizes the plan, rolls out the hidden-parameter string (applying the
// configured mismatch), captures the observation series, and records the
// true tip path. Propagates LimitViolationError and DivergenceError.
ManipulationRecord execute_manipulation(const MotionPlan& plan,
                                        const PlantConfig& plant,
                                        const ArmConfig& arm,
                                        const CameraModel& camera,
                                        double tail_s = 0.4,
                                        double sampling_period = 0.04,
                                        double dt = kDefaultDt,
                                        const Vec2& gravity = kStandardGravity);

// Earliest sample with |x - x_ref| <= w and |y - y_ref| <= h (closed box).
std::optional<double> check_success(const std::vector<TimedPoint>& tip_trajectory,
                                    const TargetSpec& target);

// Earliest sample at which any string segment or arm link touches the
// obstacle rectangle. joint_angles must be aligned with string_states.
std::optional<double> check_collision(
    const std::vector<TimedState>& string_states,
    const std::vector<std::array<double, 3>>& joint_angles,
    const ObstacleSpec& obstacle, const ArmConfig& arm);

bool segment_intersects_rect(const Vec2& a, const Vec2& b, const Vec2& corner,
                             double width, double height);

}  // namespace castsim
