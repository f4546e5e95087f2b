#include "castsim/plant.hpp"

#include <cmath>

#include "castsim/errors.hpp"

namespace castsim {

ManipulationRecord execute_manipulation(const MotionPlan& plan,
                                        const PlantConfig& plant,
                                        const ArmConfig& arm,
                                        const CameraModel& camera, double tail_s,
                                        double sampling_period, double dt,
                                        const Vec2& gravity) {
    if (!plant.hidden_params.all_positive())
        throw ConfigError("plant parameters must be positive");

    RealizedMotion motion = realize_trajectory(plan, arm, tail_s);

    SimOptions options;
    if (plant.mismatch_mode == MismatchMode::stiffening)
        options.hinge_stiffening_kappa = plant.stiffening_kappa;

    const StringState initial = init_hanging_state(
        motion.hand.front().pose, plant.plant_geometry, plant.hidden_params, gravity);

    ManipulationRecord record;
    record.plant_states = simulate_rollout(plant.hidden_params, plant.plant_geometry,
                                           motion.hand, initial, dt, gravity, options);
    record.frames = capture_series(record.plant_states, camera, sampling_period);
    record.tip.reserve(record.plant_states.size());
    for (const TimedState& ts : record.plant_states)
        record.tip.push_back({ts.time, ts.state.positions.back()});
    record.hand = std::move(motion.hand);
    record.joint_angles = std::move(motion.joint_angles);
    return record;
}

std::optional<double> check_success(const std::vector<TimedPoint>& tip_trajectory,
                                    const TargetSpec& target) {
    for (const TimedPoint& tp : tip_trajectory)
        if (std::fabs(tp.point.x - target.x_ref) <= target.w &&
            std::fabs(tp.point.y - target.y_ref) <= target.h)
            return tp.time;
    return std::nullopt;
}

bool segment_intersects_rect(const Vec2& a, const Vec2& b, const Vec2& corner,
                             double width, double height) {
    const double xmin = corner.x, xmax = corner.x + width;
    const double ymin = corner.y, ymax = corner.y + height;
    // Liang-Barsky: a nonempty clipped parameter range means contact.
    double t0 = 0.0, t1 = 1.0;
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x - xmin, xmax - a.x, a.y - ymin, ymax - a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;
        } else {
            const double r = q[i] / p[i];
            if (p[i] < 0.0) {
                if (r > t1) return false;
                if (r > t0) t0 = r;
            } else {
                if (r < t0) return false;
                if (r < t1) t1 = r;
            }
        }
    }
    return t0 <= t1;
}

std::optional<double> check_collision(
    const std::vector<TimedState>& string_states,
    const std::vector<std::array<double, 3>>& joint_angles,
    const ObstacleSpec& obstacle, const ArmConfig& arm) {
    if (!obstacle.present) return std::nullopt;
    if (joint_angles.size() != string_states.size())
        throw ConfigError("check_collision: joint angles misaligned with states");

    for (std::size_t k = 0; k < string_states.size(); ++k) {
        const auto& pts = string_states[k].state.positions;
        bool hit = false;
        for (std::size_t i = 0; i + 1 < pts.size() && !hit; ++i)
            hit = segment_intersects_rect(pts[i], pts[i + 1], obstacle.corner,
                                          obstacle.width, obstacle.height);
        if (!hit) {
            Vec2 joint = arm.base_position;
            double phi = 0.0;
            for (int j = 0; j < 3 && !hit; ++j) {
                phi += joint_angles[k][j];
                const Vec2 next =
                    joint + arm.link_lengths[j] * Vec2{std::cos(phi), std::sin(phi)};
                hit = segment_intersects_rect(joint, next, obstacle.corner,
                                              obstacle.width, obstacle.height);
                joint = next;
            }
        }
        if (hit) return string_states[k].time;
    }
    return std::nullopt;
}

}  // namespace castsim
