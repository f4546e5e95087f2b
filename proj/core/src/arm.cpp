#include "castsim/arm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "castsim/errors.hpp"

namespace castsim {

namespace {

constexpr int kCurveSegments = 5;  // t_0..t_5 split of [0, T]

struct JointSample {
    std::array<double, 3> angles;
    std::array<double, 3> velocities;
};

JointSample sample_joints(const MotionPlan& plan, double t) {
    JointSample s;
    for (int j = 0; j < 3; ++j) {
        if (t >= plan.duration) {
            s.angles[j] = plan.initial_angles[j] +
                          bezier_velocity_integral(plan.control_velocities[j],
                                                   plan.duration, plan.duration);
            s.velocities[j] = 0.0;
        } else {
            s.angles[j] = plan.initial_angles[j] +
                          bezier_velocity_integral(plan.control_velocities[j],
                                                   plan.duration, t);
            s.velocities[j] = bezier_velocity(plan.control_velocities[j],
                                              plan.duration, t);
        }
    }
    return s;
}

}  // namespace

HandPose forward_kinematics(const std::array<double, 3>& angles,
                            const ArmConfig& config) {
    HandPose pose;
    pose.position = config.base_position;
    double cumulative = 0.0;
    for (int j = 0; j < 3; ++j) {
        cumulative += angles[j];
        pose.position += config.link_lengths[j] *
                         Vec2{std::cos(cumulative), std::sin(cumulative)};
    }
    pose.orientation = wrap_angle(cumulative);
    return pose;
}

double bezier_velocity(const std::array<double, 6>& controls, double duration,
                       double t) {
    if (t < 0.0 || t > duration)
        throw std::domain_error("bezier_velocity: t outside [0, T]");
    const double u = t / duration;
    std::array<double, 6> w = controls;
    for (int level = 5; level >= 1; --level)
        for (int k = 0; k < level; ++k)
            w[k] = (1.0 - u) * w[k] + u * w[k + 1];
    return w[0];
}

double bezier_velocity_integral(const std::array<double, 6>& controls,
                                double duration, double t) {
    if (t < 0.0 || t > duration)
        throw std::domain_error("bezier_velocity_integral: t outside [0, T]");
    const double u = t / duration;
    const double s = 1.0 - u;
    double up[7], sp[7];
    up[0] = sp[0] = 1.0;
    for (int j = 1; j <= 6; ++j) {
        up[j] = up[j - 1] * u;
        sp[j] = sp[j - 1] * s;
    }
    static constexpr double choose[7] = {1, 6, 15, 20, 15, 6, 1};
    // Tail sums of the degree-6 basis give the degree-5 antiderivative.
    double sum = 0.0;
    double tail = 0.0;
    for (int j = 6; j >= 1; --j) {
        tail += choose[j] * up[j] * sp[6 - j];
        sum += controls[j - 1] * tail;
    }
    return duration * sum / 6.0;
}

MotionPlan generate_motion(Rng& rng, const ArmConfig& config,
                           const std::array<double, 2>& t_range) {
    MotionPlan plan;
    for (int j = 0; j < 3; ++j)
        plan.initial_angles[j] =
            rng.uniform(config.joint_limits[j][0], config.joint_limits[j][1]);
    plan.duration = rng.uniform(t_range[0], t_range[1]);
    const double dt_segment = plan.duration / kCurveSegments;
    for (int j = 0; j < 3; ++j) {
        plan.control_velocities[j][0] = 0.0;
        plan.control_velocities[j][5] = 0.0;
        for (int n = 1; n <= 4; ++n) {
            const double accel = rng.uniform(-config.joint_acceleration_limit,
                                             config.joint_acceleration_limit);
            plan.control_velocities[j][n] = accel * dt_segment;
        }
    }
    return plan;
}

MotionPlan perturb_motion(const MotionPlan& prev, Rng& rng, int iteration,
                          const ArmConfig& config,
                          const std::array<double, 2>& t_range) {
    if (iteration < 2)
        throw ConfigError("perturb_motion applies from the second iteration on");
    MotionPlan plan = prev;  // initial pose kept from the first iteration
    const double t_width = t_range[1] - t_range[0];
    plan.duration = std::clamp(
        prev.duration + rng.symmetric() * config.perturbation_fraction * t_width,
        t_range[0], t_range[1]);
    // Half-range V_n was originally drawn from: alpha_max * T/5.
    const double half_range =
        config.joint_acceleration_limit * prev.duration / kCurveSegments;
    const double scale = config.perturbation_fraction * half_range;
    for (int j = 0; j < 3; ++j)
        for (int n = 1; n <= 4; ++n)
            plan.control_velocities[j][n] =
                prev.control_velocities[j][n] + rng.symmetric() * scale;
    return plan;
}

RealizedMotion realize_trajectory(const MotionPlan& plan, const ArmConfig& config,
                                  double tail_s) {
    if (plan.duration <= 0.0) throw ConfigError("plan duration must be positive");
    const double p = config.command_period;
    const int motion_steps = static_cast<int>(std::ceil(plan.duration / p - 1e-9));
    const int tail_steps = static_cast<int>(std::llround(tail_s / p));
    const int total = motion_steps + tail_steps;

    RealizedMotion out;
    out.motion_duration = plan.duration;
    out.hand.reserve(total + 1);
    out.joint_angles.reserve(total + 1);
    out.joint_velocities.reserve(total + 1);

    for (int i = 0; i <= total; ++i) {
        const double t = i * p;
        const JointSample js = sample_joints(plan, t);

        for (int j = 0; j < 3; ++j) {
            if (js.angles[j] < config.joint_limits[j][0] ||
                js.angles[j] > config.joint_limits[j][1])
                throw LimitViolationError("joint angle", j, t);
            if (std::fabs(js.velocities[j]) > config.joint_velocity_limit)
                throw LimitViolationError("joint velocity", j, t);
        }

        HandPose pose = forward_kinematics(js.angles, config);
        // Jacobian velocity: each link tip sweeps at its cumulative rate.
        double phi = 0.0, phi_rate = 0.0;
        Vec2 v{};
        for (int j = 0; j < 3; ++j) {
            phi += js.angles[j];
            phi_rate += js.velocities[j];
            v += config.link_lengths[j] * phi_rate *
                 Vec2{-std::sin(phi), std::cos(phi)};
        }
        pose.velocity = v;
        pose.angular_velocity = phi_rate;
        if (norm(v) > config.composite_speed_limit)
            throw LimitViolationError("composite hand speed", -1, t);

        out.hand.push_back({t, pose});
        out.joint_angles.push_back(js.angles);
        out.joint_velocities.push_back(js.velocities);
    }
    return out;
}

}  // namespace castsim
