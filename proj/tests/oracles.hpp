#pragma once

// Independent reference implementations used to freeze expected values.
// Everything here is written straight from the model definition with its own
// index bookkeeping and must stay decoupled from the library code paths it
// checks.

#include <array>
#include <cmath>
#include <vector>

#include "castsim/arm.hpp"
#include "castsim/observation.hpp"
#include "castsim/string_model.hpp"

namespace oracle {

using castsim::Vec2;

inline Vec2 rot90(const Vec2& v) {
    // Rotation matrix [[0,-1],[1,0]] applied explicitly.
    return {0.0 * v.x - 1.0 * v.y, 1.0 * v.x + 0.0 * v.y};
}

inline double wrap_pi(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a <= -M_PI) a += 2.0 * M_PI;
    return a;
}

// Direct evaluation of the equation of motion, one force family at a time,
// assembled per mass point with the textbook index pattern: point i feels
// F_s(i) - F_s(i-1), F_d(i) - F_d(i-1), hinge forces from the hinges at
// i-1, i, i+1, air drag, gravity, and (through the first segment) the grasp
// hinge couple.
inline std::vector<Vec2> accelerations(const std::vector<Vec2>& pos,
                                       const std::vector<Vec2>& vel,
                                       const castsim::StringParams& prm,
                                       double rest_length,
                                       const castsim::HandPose& hand,
                                       const Vec2& gravity) {
    const int n = static_cast<int>(pos.size());
    const int segs = n - 1;

    // Segment spring and damper forces, F[i] pulling point i toward i+1.
    std::vector<Vec2> f_spring(segs), f_damp(segs);
    for (int i = 0; i < segs; ++i) {
        const Vec2 d = pos[i + 1] - pos[i];
        const double len = std::sqrt(d.x * d.x + d.y * d.y);
        if (len < 1e-12) {
            f_spring[i] = f_damp[i] = Vec2{};
            continue;
        }
        const Vec2 unit{d.x / len, d.y / len};
        f_spring[i] = prm.k_s * (len - rest_length) * unit;
        const Vec2 dv = vel[i + 1] - vel[i];
        f_damp[i] = prm.c_s * (dv.x * unit.x + dv.y * unit.y) * unit;
    }

    // Hinge forces: left force on i-1, right force on i+1, reaction on i.
    // Torque from the bend angle (spring) and its rate (damper), mapped to
    // perpendicular forces of magnitude torque/rest_length.
    std::vector<Vec2> f_left_spring(n, Vec2{}), f_right_spring(n, Vec2{});
    std::vector<Vec2> f_left_damp(n, Vec2{}), f_right_damp(n, Vec2{});
    for (int i = 1; i + 1 < n; ++i) {
        const Vec2 d_in = pos[i] - pos[i - 1];
        const Vec2 d_out = pos[i + 1] - pos[i];
        const double len_in = std::sqrt(d_in.x * d_in.x + d_in.y * d_in.y);
        const double len_out = std::sqrt(d_out.x * d_out.x + d_out.y * d_out.y);
        if (len_in < 1e-12 || len_out < 1e-12) continue;

        const double bend =
            wrap_pi(std::atan2(d_out.y, d_out.x) - std::atan2(d_in.y, d_in.x));
        const Vec2 dv_in = vel[i] - vel[i - 1];
        const Vec2 dv_out = vel[i + 1] - vel[i];
        const double omega_in =
            (d_in.x * dv_in.y - d_in.y * dv_in.x) / (len_in * len_in);
        const double omega_out =
            (d_out.x * dv_out.y - d_out.y * dv_out.x) / (len_out * len_out);
        const double bend_rate = omega_out - omega_in;

        const double torque_spring = -prm.k_h * bend;
        const double torque_damp = -prm.c_h * bend_rate;
        const Vec2 unit_in{d_in.x / len_in, d_in.y / len_in};
        const Vec2 unit_out{d_out.x / len_out, d_out.y / len_out};
        f_left_spring[i] = (torque_spring / rest_length) * rot90(unit_in);
        f_right_spring[i] = (torque_spring / rest_length) * rot90(unit_out);
        f_left_damp[i] = (torque_damp / rest_length) * rot90(unit_in);
        f_right_damp[i] = (torque_damp / rest_length) * rot90(unit_out);
    }

    // Grasp hinge couple on the first segment.
    Vec2 f_grasp{};
    {
        const Vec2 d = pos[1] - pos[0];
        const double len = std::sqrt(d.x * d.x + d.y * d.y);
        if (len >= 1e-12) {
            const double rel =
                wrap_pi(std::atan2(d.y, d.x) - hand.orientation);
            const Vec2 dv = vel[1] - vel[0];
            const double omega = (d.x * dv.y - d.y * dv.x) / (len * len);
            const double torque = -prm.k_ph * rel - prm.c_ph * (omega - hand.angular_velocity);
            f_grasp = (torque / rest_length) * rot90({d.x / len, d.y / len});
        }
    }

    std::vector<Vec2> accel(n);
    for (int i = 0; i < n; ++i) {
        Vec2 f = gravity;
        const double speed = std::sqrt(vel[i].x * vel[i].x + vel[i].y * vel[i].y);
        f += -prm.c_c1 * vel[i] - prm.c_c2 * speed * vel[i];
        if (i < segs) f += f_spring[i] + f_damp[i];
        if (i > 0) f -= f_spring[i - 1] + f_damp[i - 1];
        if (i + 1 < n)
            f += f_left_spring[i + 1] + f_left_damp[i + 1];  // hinge at i+1
        if (i > 0) f += f_right_spring[i - 1] + f_right_damp[i - 1];  // at i-1
        f -= f_left_spring[i] + f_left_damp[i];   // own hinge reaction
        f -= f_right_spring[i] + f_right_damp[i];
        if (i == 1) f += f_grasp;
        if (i == 0) f -= f_grasp;
        accel[i] = f;
    }
    return accel;
}

// Closed-form hanging equilibrium: segment j (0-based) is stretched by
// g*(n-1-j)/k_s, so the tip hangs L + g*n*(n-1)/(2 k_s) below the grasp.
inline double hanging_tip_depth(int n, double total_length, double k_s,
                                double g = 9.81) {
    return total_length + g * n * (n - 1) / (2.0 * k_s);
}

inline double hanging_point_depth(int i, int n, double total_length, double k_s,
                                  double g = 9.81) {
    const double l0 = total_length / (n - 1);
    double depth = 0.0;
    for (int j = 0; j < i; ++j) depth += l0 + g * (n - 1 - j) / k_s;
    return depth;
}

// Forward kinematics via chained 2D homogeneous transforms.
inline castsim::HandPose fk_transform_chain(const std::array<double, 3>& angles,
                                            const castsim::ArmConfig& config) {
    std::array<std::array<double, 3>, 3> m{{{1, 0, config.base_position.x},
                                            {0, 1, config.base_position.y},
                                            {0, 0, 1}}};
    auto mul = [](const std::array<std::array<double, 3>, 3>& a,
                  const std::array<std::array<double, 3>, 3>& b) {
        std::array<std::array<double, 3>, 3> c{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
        return c;
    };
    double total = 0.0;
    for (int j = 0; j < 3; ++j) {
        const double c = std::cos(angles[j]), s = std::sin(angles[j]);
        const std::array<std::array<double, 3>, 3> joint{
            {{c, -s, 0}, {s, c, 0}, {0, 0, 1}}};
        const std::array<std::array<double, 3>, 3> link{
            {{1, 0, config.link_lengths[j]}, {0, 1, 0}, {0, 0, 1}}};
        m = mul(mul(m, joint), link);
        total += angles[j];
    }
    castsim::HandPose pose;
    pose.position = {m[0][2], m[1][2]};
    pose.orientation = wrap_pi(total);
    return pose;
}

// Composite Simpson quadrature of the joint-velocity curve.
inline double integrate_velocity_simpson(const std::array<double, 6>& controls,
                                         double duration, double t_end,
                                         int intervals) {
    if (intervals % 2) ++intervals;
    const double h = t_end / intervals;
    double sum = castsim::bezier_velocity(controls, duration, 0.0) +
                 castsim::bezier_velocity(controls, duration, t_end);
    for (int i = 1; i < intervals; ++i)
        sum += castsim::bezier_velocity(controls, duration, i * h) *
               (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

// Brute-force capped chessboard distance transform.
inline std::vector<int> chessboard_scores(const castsim::BinaryFrame& frame,
                                          int p_max) {
    std::vector<int> out(frame.bits.size(), 0);
    for (int y = 0; y < frame.height; ++y)
        for (int x = 0; x < frame.width; ++x) {
            int best = p_max;  // anything >= p_max scores zero
            for (int sy = 0; sy < frame.height; ++sy)
                for (int sx = 0; sx < frame.width; ++sx) {
                    if (!frame.at(sx, sy)) continue;
                    const int d = std::max(std::abs(sx - x), std::abs(sy - y));
                    if (d < best) best = d;
                }
            out[static_cast<std::size_t>(y) * frame.width + x] = p_max - best;
        }
    return out;
}

// Exhaustive segment-vs-rectangle test: endpoint containment plus proper
// segment-segment intersection against each edge.
inline bool segment_hits_rect(const Vec2& a, const Vec2& b, const Vec2& corner,
                              double w, double h) {
    auto inside = [&](const Vec2& p) {
        return p.x >= corner.x && p.x <= corner.x + w && p.y >= corner.y &&
               p.y <= corner.y + h;
    };
    if (inside(a) || inside(b)) return true;

    auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        const double v = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
        if (v > 0) return 1;
        if (v < 0) return -1;
        return 0;
    };
    auto on_segment = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
               std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
    };
    auto segments_cross = [&](const Vec2& p1, const Vec2& q1, const Vec2& p2,
                              const Vec2& q2) {
        const int o1 = orient(p1, q1, p2), o2 = orient(p1, q1, q2);
        const int o3 = orient(p2, q2, p1), o4 = orient(p2, q2, q1);
        if (o1 != o2 && o3 != o4) return true;
        if (o1 == 0 && on_segment(p1, q1, p2)) return true;
        if (o2 == 0 && on_segment(p1, q1, q2)) return true;
        if (o3 == 0 && on_segment(p2, q2, p1)) return true;
        if (o4 == 0 && on_segment(p2, q2, q1)) return true;
        return false;
    };

    const Vec2 c1 = corner;
    const Vec2 c2{corner.x + w, corner.y};
    const Vec2 c3{corner.x + w, corner.y + h};
    const Vec2 c4{corner.x, corner.y + h};
    return segments_cross(a, b, c1, c2) || segments_cross(a, b, c2, c3) ||
           segments_cross(a, b, c3, c4) || segments_cross(a, b, c4, c1);
}

}  // namespace oracle
