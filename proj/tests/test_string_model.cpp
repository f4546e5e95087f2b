#include <doctest.h>

#include <cmath>
#include <cstring>

#include "castsim/errors.hpp"
#include "castsim/estimation.hpp"
#include "castsim/rng.hpp"
#include "castsim/string_model.hpp"
#include "oracles.hpp"

using namespace castsim;

namespace {

StringParams mid_range_params() {
    ParamRange ranges;
    std::array<double, 8> chi;
    chi.fill(0.5);
    return params_from_exponents(chi, ranges);
}

HandPose hanging_hand(const Vec2& position) {
    HandPose hand;
    hand.position = position;
    hand.orientation = -M_PI / 2;  // axis along the hanging string
    return hand;
}

StringState random_state(Rng& rng, int n, double span) {
    StringState s;
    s.positions.resize(n);
    s.velocities.resize(n);
    // A chain-like layout keeps spring extensions moderate.
    Vec2 p{rng.uniform(-0.2, 0.2), rng.uniform(0.6, 1.0)};
    for (int i = 0; i < n; ++i) {
        s.positions[i] = p;
        p += Vec2{rng.uniform(-span, span), rng.uniform(-span, span)};
        s.velocities[i] = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
    }
    return s;
}

}  // namespace

TEST_CASE("straight vertical string at rest accelerates straight down") {
    StringGeometry geom{10, 0.3};
    StringParams params = mid_range_params();
    StringState state;
    const Vec2 grasp{0.0, 1.0};
    for (int i = 0; i < geom.n; ++i) {
        state.positions.push_back(grasp + Vec2{0.0, -i * geom.rest_length()});
        state.velocities.push_back({});
    }
    const auto accel =
        net_accelerations(state, params, geom, hanging_hand(grasp));
    for (int i = 1; i < geom.n; ++i) {
        // Exact rest lengths: zero spring force (up to position rounding),
        // zero bending, pure gravity.
        CHECK(std::fabs(accel[i].x) < 1e-8);
        CHECK(accel[i].y == doctest::Approx(-9.81).epsilon(1e-9));
    }
}

TEST_CASE("right-angle hinge produces perpendicular force couples") {
    StringGeometry geom{3, 0.2};
    const double l0 = geom.rest_length();
    StringParams params{};
    params.k_h = 0.7;

    StringState state;
    state.positions = {{0.0, l0}, {0.0, 0.0}, {l0, 0.0}};
    state.velocities = {{}, {}, {}};
    HandPose hand;
    hand.position = state.positions[0];
    hand.orientation = -M_PI / 2;  // aligned with the first segment: no grasp torque

    const auto accel = net_accelerations(state, params, geom, hand, Vec2{0, 0});
    const double expected = params.k_h * (M_PI / 2) / l0;  // tau / rest_length

    CHECK(accel[0].x == doctest::Approx(-expected).epsilon(1e-12));
    CHECK(accel[0].y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(accel[2].x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(accel[2].y == doctest::Approx(-expected).epsilon(1e-12));
    // Interior point takes the negated sum: force balance.
    CHECK(accel[1].x == doctest::Approx(expected).epsilon(1e-12));
    CHECK(accel[1].y == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("net_accelerations matches the direct equation-of-motion oracle") {
    Rng rng(42);
    StringParams params = mid_range_params();
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 4 + static_cast<int>(rng.raw() % 7);  // 4..10 points
        StringGeometry geom{n, 0.3};
        StringState state = random_state(rng, n, 0.05);
        HandPose hand;
        hand.position = state.positions[0];
        hand.orientation = rng.uniform(-M_PI, M_PI);
        hand.angular_velocity = rng.uniform(-5, 5);

        const auto got = net_accelerations(state, params, geom, hand);
        const auto want =
            oracle::accelerations(state.positions, state.velocities, params,
                                  geom.rest_length(), hand, kStandardGravity);
        for (int i = 0; i < n; ++i) {
            const double scale = std::max(1.0, norm(want[i]));
            CHECK(std::fabs(got[i].x - want[i].x) <= 1e-10 * scale);
            CHECK(std::fabs(got[i].y - want[i].y) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("force-free drift translates points by v*dt") {
    StringGeometry geom{4, 0.3};
    StringParams params{};  // all zero: no internal forces
    StringState state;
    for (int i = 0; i < 4; ++i) {
        state.positions.push_back({0.1 * i, -0.1 * i});
        state.velocities.push_back({1.0, 2.0});
    }
    HandPose hand;
    hand.position = state.positions[0];
    HandPose next = hand;
    const double dt = 0.25;
    next.position = hand.position + dt * Vec2{1.0, 2.0};
    next.velocity = {1.0, 2.0};

    const StringState stepped =
        euler_step(state, params, geom, hand, next, dt, Vec2{0, 0});
    for (int i = 1; i < 4; ++i) {
        CHECK(stepped.positions[i].x ==
              doctest::Approx(state.positions[i].x + 1.0 * dt));
        CHECK(stepped.positions[i].y ==
              doctest::Approx(state.positions[i].y + 2.0 * dt));
    }
}

TEST_CASE("hanging equilibrium holds under integration") {
    StringGeometry geom{10, 0.3};
    StringParams params = mid_range_params();
    const HandPose hand = hanging_hand({0.0, 1.0});
    const StringState initial = init_hanging_state(hand, geom, params);

    // Analytic stretch oracle: this state is the discrete equilibrium.
    const double want_depth =
        oracle::hanging_tip_depth(geom.n, geom.total_length, params.k_s);
    CHECK(initial.positions.back().y == doctest::Approx(1.0 - want_depth));

    HandTrajectory still;
    for (int k = 0; k <= 100; ++k) still.push_back({k * 0.005, hand});
    const auto states =
        simulate_rollout(params, geom, still, initial, kDefaultDt);
    const Vec2 tip = states.back().state.positions.back();
    CHECK(norm(tip - initial.positions.back()) < 1e-6);
}

TEST_CASE("too-large dt for a stiff spring raises divergence") {
    StringGeometry geom{10, 0.3};
    StringParams params = mid_range_params();
    params.k_s = 9.0e5;
    const HandPose hand = hanging_hand({0.0, 1.0});
    StringState initial = init_hanging_state(hand, geom, params);
    initial.positions[5].x += 0.001;  // off equilibrium

    HandTrajectory still;
    for (int k = 0; k <= 100; ++k) still.push_back({k * 0.005, hand});
    CHECK_THROWS_AS(simulate_rollout(params, geom, still, initial, 0.01),
                    DivergenceError);
}

TEST_CASE("rollout emits one state per command sample, deterministically") {
    StringGeometry geom{6, 0.3};
    StringParams params = mid_range_params();
    HandTrajectory hand;
    for (int k = 0; k <= 60; ++k) {
        TimedPose tp;
        tp.time = k * 0.005;
        tp.pose.position = {0.05 * std::sin(tp.time * 8.0), 1.0};
        tp.pose.orientation = -M_PI / 2;
        tp.pose.velocity = {0.4 * std::cos(tp.time * 8.0), 0.0};
        hand.push_back(tp);
    }
    const StringState initial = init_hanging_state(hand.front().pose, geom, params);
    const auto a = simulate_rollout(params, geom, hand, initial, kDefaultDt);
    const auto b = simulate_rollout(params, geom, hand, initial, kDefaultDt);

    REQUIRE(a.size() == hand.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].time == hand[k].time);
        CHECK(std::memcmp(a[k].state.positions.data(), b[k].state.positions.data(),
                          geom.n * sizeof(Vec2)) == 0);
        // Grasp constraint: exact equality with the commanded hand position.
        CHECK(a[k].state.positions[0].x == hand[k].pose.position.x);
        CHECK(a[k].state.positions[0].y == hand[k].pose.position.y);
    }
}

TEST_CASE("single-sample trajectory returns only the initial state") {
    StringGeometry geom{5, 0.3};
    StringParams params = mid_range_params();
    const HandPose hand = hanging_hand({0.2, 0.8});
    const StringState initial = init_hanging_state(hand, geom, params);
    const auto states =
        simulate_rollout(params, geom, {{0.0, hand}}, initial, kDefaultDt);
    REQUIRE(states.size() == 1);
    CHECK(states[0].state.positions == initial.positions);
}

TEST_CASE("init_hanging_state lays the string straight down") {
    StringParams params = mid_range_params();

    SUBCASE("stiff spring: points near the unstretched grid") {
        params.k_s = 9.0e5;
        StringGeometry geom{10, 0.3};
        const StringState s = init_hanging_state(hanging_hand({0.0, 1.0}), geom, params);
        for (int i = 0; i < 10; ++i) {
            CHECK(s.positions[i].x == 0.0);
            // Nominal grid position, off by no more than the gravity stretch.
            const double stretch =
                oracle::hanging_point_depth(i, 10, 0.3, params.k_s) - i * 0.3 / 9;
            CHECK(std::fabs(s.positions[i].y - (1.0 - i * 0.3 / 9)) <=
                  stretch + 1e-12);
            CHECK(s.positions[i].y ==
                  doctest::Approx(1.0 - oracle::hanging_point_depth(
                                            i, 10, 0.3, params.k_s)));
        }
    }
    SUBCASE("two-point chain") {
        StringGeometry geom{2, 0.3};
        const StringState s = init_hanging_state(hanging_hand({0.0, 1.0}), geom, params);
        REQUIRE(s.positions.size() == 2);
        CHECK(norm(s.positions[1] - s.positions[0]) ==
              doctest::Approx(0.3).epsilon(1e-3));
    }
    SUBCASE("soft spring stretches by the closed-form sum") {
        params.k_s = 9.0e3;
        StringGeometry geom{10, 0.3};
        const StringState s = init_hanging_state(hanging_hand({0.0, 1.0}), geom, params);
        const double depth = 1.0 - s.positions.back().y;
        CHECK(depth == doctest::Approx(oracle::hanging_tip_depth(10, 0.3, 9.0e3))
                           .epsilon(1e-12));
    }
}

TEST_CASE("internal forces cancel without gravity and drag") {
    Rng rng(7);
    StringParams params = mid_range_params();
    params.c_c1 = 0.0;
    params.c_c2 = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 3 + static_cast<int>(rng.raw() % 8);
        StringGeometry geom{n, 0.3};
        StringState state = random_state(rng, n, 0.04);
        HandPose hand;
        hand.position = state.positions[0];
        hand.orientation = rng.uniform(-M_PI, M_PI);
        const auto accel =
            net_accelerations(state, params, geom, hand, Vec2{0, 0});
        Vec2 sum{};
        for (const Vec2& a : accel) sum += a;
        CHECK(std::fabs(sum.x) < 1e-9);
        CHECK(std::fabs(sum.y) < 1e-9);
    }
}

TEST_CASE("hinge torque straightens a bent chain") {
    StringGeometry geom{3, 0.2};
    const double l0 = geom.rest_length();
    for (double k_h : {1e-3, 0.1, 10.0}) {
        StringParams params{};
        params.k_h = k_h;
        const double eps = 0.15;
        StringState state;
        state.positions = {{0.0, 0.0}, {l0, 0.0}};
        state.positions.push_back(
            state.positions[1] + l0 * Vec2{std::cos(eps), std::sin(eps)});
        state.velocities = {{}, {}, {}};
        HandPose hand;
        hand.position = state.positions[0];
        hand.orientation = 0.0;

        auto bend = [&](const StringState& s) {
            const Vec2 d1 = s.positions[1] - s.positions[0];
            const Vec2 d2 = s.positions[2] - s.positions[1];
            return std::fabs(std::atan2(cross(d1, d2), dot(d1, d2)));
        };
        StringState next = state;
        for (int i = 0; i < 5; ++i)
            next = euler_step(next, params, geom, hand, hand, 1e-4, Vec2{0, 0});
        CHECK(bend(next) < bend(state));
    }
}

TEST_CASE("energy never increases with all dampers active") {
    Rng rng(11);
    ParamRange ranges;
    const Vec2 gravity = kStandardGravity;

    auto total_energy = [&](const StringState& s, const StringParams& p,
                            const StringGeometry& geom, const HandPose& hand) {
        double e = 0.0;
        const double l0 = geom.rest_length();
        for (int i = 0; i < geom.n; ++i) {
            e += 0.5 * norm_sq(s.velocities[i]);
            e += 9.81 * s.positions[i].y;
        }
        for (int i = 0; i + 1 < geom.n; ++i) {
            const double stretch = norm(s.positions[i + 1] - s.positions[i]) - l0;
            e += 0.5 * p.k_s * stretch * stretch;
        }
        for (int i = 1; i + 1 < geom.n; ++i) {
            const Vec2 d1 = s.positions[i] - s.positions[i - 1];
            const Vec2 d2 = s.positions[i + 1] - s.positions[i];
            const double beta = std::atan2(cross(d1, d2), dot(d1, d2));
            e += 0.5 * p.k_h * beta * beta;
        }
        const Vec2 d = s.positions[1] - s.positions[0];
        const Vec2 axis{std::cos(hand.orientation), std::sin(hand.orientation)};
        const double psi = std::atan2(cross(axis, d), dot(axis, d));
        e += 0.5 * p.k_ph * psi * psi;
        return e;
    };

    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        // Monotone decrease of the plain energy needs the dampers to dominate
        // both the symplectic O(dt^2) exchange and the small non-conservative
        // residual of the tau/rest_length hinge couples (exact only at rest
        // length). Draw dampers from the upper half of their ranges, keep
        // perturbations small, and bound dt by the damping-dominated step.
        std::array<double, 8> chi;
        for (double& c : chi) c = rng.uniform01();
        chi[1] = rng.uniform(0.5, 1.0);  // c_s
        chi[3] = rng.uniform(0.5, 1.0);  // c_h
        chi[7] = rng.uniform(0.5, 1.0);  // c_ph
        const StringParams params = params_from_exponents(chi, ranges);
        StringGeometry geom{8, 0.3};
        const HandPose hand = hanging_hand({0.0, 1.0});
        StringState state = init_hanging_state(hand, geom, params);
        for (int i = 1; i < geom.n; ++i) {
            state.positions[i] += Vec2{rng.uniform(-2e-3, 2e-3), rng.uniform(-2e-3, 2e-3)};
            state.velocities[i] = {rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)};
        }
        const double dt =
            std::min({kDefaultDt, 0.05 * params.c_s / params.k_s,
                      0.05 * params.c_h / std::max(params.k_h, 1e-9)});
        double e_prev = total_energy(state, params, geom, hand);
        for (int step = 0; step < 100; ++step) {
            state = euler_step(state, params, geom, hand, hand, dt);
            const double e = total_energy(state, params, geom, hand);
            CHECK(e <= e_prev + 1e-12 * std::max(1.0, std::fabs(e_prev)));
            e_prev = e;
        }
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("non-finite input is rejected") {
    StringGeometry geom{3, 0.3};
    StringParams params = mid_range_params();
    StringState state = init_hanging_state(hanging_hand({0, 1}), geom, params);
    state.positions[2].x = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(
        net_accelerations(state, params, geom, hanging_hand({0, 1})),
        InvalidStateError);
}
