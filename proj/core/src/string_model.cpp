#include "castsim/string_model.hpp"

#include <cmath>
#include <cstdint>

#include "castsim/errors.hpp"

namespace castsim {

namespace {

constexpr double kDegenerateLength = 1e-12;
constexpr double kRunawayCoordinate = 1e7;

// Angular rate of a segment direction d with relative endpoint velocity dd.
inline double direction_rate(const Vec2& d, const Vec2& dd, double len_sq) {
    return cross(d, dd) / len_sq;
}

// Accumulates all per-unit-mass forces into accel. Interior hinge torque
// tau = k_h*(pi - theta) + c_h*theta_dot is applied as a couple: forces of
// magnitude tau/rest_length perpendicular to the adjacent segments on the two
// neighbors, with the reaction on the interior point. The grasp hinge couples
// the hand axis to the first segment the same way; its reaction lands on the
// kinematically driven point 0, so only point 1 feels it.
void accumulate_forces(const StringState& state, const StringParams& params,
                       const StringGeometry& geometry, const HandPose& hand,
                       const Vec2& gravity, const SimOptions& options,
                       std::vector<Vec2>& accel) {
    const int n = state.n();
    const double inv_l0 = 1.0 / geometry.rest_length();
    const auto& p = state.positions;
    const auto& v = state.velocities;

    accel.assign(n, Vec2{});

    for (int i = 0; i < n; ++i) {
        const Vec2& vi = v[i];
        const double speed = norm(vi);
        accel[i] += gravity - (params.c_c1 + params.c_c2 * speed) * vi;
    }

    // Segment springs and dampers (damping acts along the segment axis).
    for (int s = 0; s + 1 < n; ++s) {
        const Vec2 d = p[s + 1] - p[s];
        const double len = norm(d);
        if (len < kDegenerateLength) continue;
        const Vec2 u = (1.0 / len) * d;
        const double tension = params.k_s * (len - geometry.rest_length()) +
                               params.c_s * dot(v[s + 1] - v[s], u);
        const Vec2 f = tension * u;
        accel[s] += f;
        accel[s + 1] -= f;
    }

    // Interior hinges. beta is the signed turning angle between consecutive
    // segment directions (zero when straight); M is the moment the hinge
    // exerts on the outgoing segment, -M on the incoming one.
    for (int j = 1; j + 1 < n; ++j) {
        const Vec2 d1 = p[j] - p[j - 1];
        const Vec2 d2 = p[j + 1] - p[j];
        const double l1_sq = norm_sq(d1);
        const double l2_sq = norm_sq(d2);
        const double l1 = std::sqrt(l1_sq);
        const double l2 = std::sqrt(l2_sq);
        if (l1 < kDegenerateLength || l2 < kDegenerateLength) continue;

        const double beta = std::atan2(cross(d1, d2), dot(d1, d2));
        const double beta_rate = direction_rate(d2, v[j + 1] - v[j], l2_sq) -
                                 direction_rate(d1, v[j] - v[j - 1], l1_sq);
        double moment = -(params.k_h * beta + params.c_h * beta_rate);
        if (options.hinge_stiffening_kappa != 0.0)
            moment *= 1.0 + options.hinge_stiffening_kappa * beta * beta;

        const Vec2 f_out = (moment * inv_l0 / l2) * perp(d2);  // on point j+1
        const Vec2 f_in = (moment * inv_l0 / l1) * perp(d1);   // on point j-1
        accel[j + 1] += f_out;
        accel[j - 1] += f_in;
        accel[j] -= f_out + f_in;
    }

    // Grasp hinge between the hand axis and the first segment; rest angle is
    // the hand orientation itself.
    {
        const Vec2 d = p[1] - p[0];
        const double l_sq = norm_sq(d);
        const double len = std::sqrt(l_sq);
        if (len >= kDegenerateLength) {
            const Vec2 axis{std::cos(hand.orientation), std::sin(hand.orientation)};
            const double psi = std::atan2(cross(axis, d), dot(axis, d));
            const double psi_rate =
                direction_rate(d, v[1] - v[0], l_sq) - hand.angular_velocity;
            const double moment = -(params.k_ph * psi + params.c_ph * psi_rate);
            const Vec2 f = (moment * inv_l0 / len) * perp(d);
            accel[1] += f;
            accel[0] -= f;
        }
    }
}

void check_state_finite(const StringState& state) {
    for (const Vec2& r : state.positions)
        if (!finite(r)) throw InvalidStateError("non-finite position");
    for (const Vec2& u : state.velocities)
        if (!finite(u)) throw InvalidStateError("non-finite velocity");
}

inline bool runaway(const Vec2& r) {
    return !(std::fabs(r.x) < kRunawayCoordinate && std::fabs(r.y) < kRunawayCoordinate);
}

HandPose interpolate(const HandPose& a, const HandPose& b, double t) {
    HandPose out;
    out.position = lerp(a.position, b.position, t);
    out.orientation = wrap_angle(a.orientation + t * wrap_angle(b.orientation - a.orientation));
    out.velocity = lerp(a.velocity, b.velocity, t);
    out.angular_velocity = a.angular_velocity * (1.0 - t) + b.angular_velocity * t;
    return out;
}

// Advances state in place by one substep; steps is the global substep index
// used for divergence reporting.
void step_in_place(StringState& state, const StringParams& params,
                   const StringGeometry& geometry, const HandPose& hand_now,
                   const HandPose& hand_next, double dt, const Vec2& gravity,
                   const SimOptions& options, std::vector<Vec2>& accel,
                   std::int64_t step_index) {
    accumulate_forces(state, params, geometry, hand_now, gravity, options, accel);
    const int n = state.n();
    bool ok = true;
    for (int i = 1; i < n; ++i) {
        state.velocities[i] += dt * accel[i];
        state.positions[i] += dt * state.velocities[i];
        ok = ok && !runaway(state.positions[i]);
    }
    state.positions[0] = hand_next.position;
    state.velocities[0] = hand_next.velocity;
    state.time += dt;
    if (!ok) throw DivergenceError(step_index, state.time);
}

}  // namespace

std::vector<Vec2> net_accelerations(const StringState& state,
                                    const StringParams& params,
                                    const StringGeometry& geometry,
                                    const HandPose& hand, const Vec2& gravity,
                                    const SimOptions& options) {
    if (state.n() != geometry.n || state.n() != static_cast<int>(state.velocities.size()))
        throw InvalidStateError("state size does not match geometry");
    check_state_finite(state);
    std::vector<Vec2> accel;
    accumulate_forces(state, params, geometry, hand, gravity, options, accel);
    return accel;
}

StringState euler_step(const StringState& state, const StringParams& params,
                       const StringGeometry& geometry, const HandPose& hand_now,
                       const HandPose& hand_next, double dt, const Vec2& gravity,
                       const SimOptions& options) {
    if (dt <= 0.0) throw InvalidStateError("dt must be positive");
    if (!finite(hand_now.position) || !finite(hand_next.position))
        throw InvalidStateError("non-finite hand pose");
    StringState next = state;
    std::vector<Vec2> accel;
    step_in_place(next, params, geometry, hand_now, hand_next, dt, gravity,
                  options, accel, 0);
    for (const Vec2& r : next.positions)
        if (!finite(r)) throw DivergenceError(0, next.time);
    return next;
}

std::vector<TimedState> simulate_rollout(const StringParams& params,
                                         const StringGeometry& geometry,
                                         const std::vector<TimedPose>& hand_trajectory,
                                         const StringState& initial, double dt,
                                         const Vec2& gravity,
                                         const SimOptions& options) {
    if (hand_trajectory.empty())
        throw InvalidStateError("empty hand trajectory");
    if (dt <= 0.0) throw InvalidStateError("dt must be positive");
    check_state_finite(initial);

    std::vector<TimedState> out;
    out.reserve(hand_trajectory.size());
    out.push_back({hand_trajectory.front().time, initial});
    if (hand_trajectory.size() == 1) return out;

    StringState state = initial;
    std::vector<Vec2> accel;
    std::int64_t global_step = 0;

    for (std::size_t k = 0; k + 1 < hand_trajectory.size(); ++k) {
        const TimedPose& a = hand_trajectory[k];
        const TimedPose& b = hand_trajectory[k + 1];
        const double period = b.time - a.time;
        if (period <= 0.0) throw InvalidStateError("hand trajectory not time-ordered");
        const int substeps = std::max(1, static_cast<int>(std::llround(period / dt)));
        const double h = period / substeps;
        for (int s = 0; s < substeps; ++s) {
            const HandPose now = (s == 0) ? a.pose
                                          : interpolate(a.pose, b.pose,
                                                        static_cast<double>(s) / substeps);
            const HandPose next = (s + 1 == substeps)
                                      ? b.pose
                                      : interpolate(a.pose, b.pose,
                                                    static_cast<double>(s + 1) / substeps);
            step_in_place(state, params, geometry, now, next, h, gravity,
                          options, accel, global_step);
            ++global_step;
        }
        state.time = b.time;  // avoid substep rounding drift
        out.push_back({b.time, state});
    }
    return out;
}

StringState init_hanging_state(const HandPose& grasp,
                               const StringGeometry& geometry,
                               const StringParams& params, const Vec2& gravity) {
    if (!finite(grasp.position)) throw InvalidStateError("non-finite grasp pose");
    const int n = geometry.n;
    const double l0 = geometry.rest_length();
    const double g = norm(gravity);

    StringState state;
    state.positions.resize(n);
    state.velocities.assign(n, Vec2{});
    state.positions[0] = grasp.position;
    state.velocities[0] = grasp.velocity;
    double depth = 0.0;
    for (int i = 1; i < n; ++i) {
        // Segment i-1 supports the n-i points below it.
        depth += l0 + g * (n - i) / params.k_s;
        state.positions[i] = grasp.position + Vec2{0.0, -depth};
    }
    state.time = 0.0;
    return state;
}

}  // namespace castsim
