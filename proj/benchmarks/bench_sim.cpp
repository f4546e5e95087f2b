#include <benchmark/benchmark.h>

#include <cmath>

#include "castsim/estimation.hpp"
#include "castsim/matching.hpp"
#include "castsim/observation.hpp"
#include "castsim/string_model.hpp"

using namespace castsim;

namespace {

StringParams mid_params() {
    return {9.0e4, 13.0, 1.8, 4.5e-4, 0.03, 0.03, 0.07, 6.4e-4};
}

HandTrajectory swing_trajectory(double seconds) {
    HandTrajectory hand;
    const int n = static_cast<int>(seconds / 0.005);
    for (int k = 0; k <= n; ++k) {
        TimedPose tp;
        tp.time = k * 0.005;
        const double phase = tp.time * 2.0 * M_PI;
        tp.pose.position = {0.4 + 0.12 * std::sin(phase), 0.9};
        tp.pose.velocity = {0.12 * 2.0 * M_PI * std::cos(phase), 0.0};
        tp.pose.orientation = -M_PI / 2;
        hand.push_back(tp);
    }
    return hand;
}

void BM_NetAccelerations(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    StringGeometry geom{n, 0.3};
    const StringParams params = mid_params();
    HandPose hand;
    hand.position = {0.0, 1.0};
    hand.orientation = -M_PI / 2;
    const StringState s = init_hanging_state(hand, geom, params);
    for (auto _ : state) {
        auto accel = net_accelerations(s, params, geom, hand);
        benchmark::DoNotOptimize(accel);
    }
}
BENCHMARK(BM_NetAccelerations)->Arg(10)->Arg(25);

void BM_Rollout(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    StringGeometry geom{n, 0.3};
    const StringParams params = mid_params();
    const HandTrajectory hand = swing_trajectory(1.0);
    const StringState initial = init_hanging_state(hand.front().pose, geom, params);
    for (auto _ : state) {
        auto states = simulate_rollout(params, geom, hand, initial, kDefaultDt);
        benchmark::DoNotOptimize(states);
    }
}
BENCHMARK(BM_Rollout)->Arg(10)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_BuildScoreField(benchmark::State& state) {
    StringGeometry geom{10, 0.3};
    const StringParams params = mid_params();
    const CameraModel camera;
    const HandTrajectory hand = swing_trajectory(0.2);
    const StringState initial = init_hanging_state(hand.front().pose, geom, params);
    const auto states = simulate_rollout(params, geom, hand, initial, kDefaultDt);
    const BinaryFrame frame = rasterize(states.back().state.positions, camera, 0.0);
    for (auto _ : state) {
        auto field = build_score_field(frame, 8);
        benchmark::DoNotOptimize(field);
    }
}
BENCHMARK(BM_BuildScoreField)->Unit(benchmark::kMillisecond);

void BM_MatchingRatePrepared(benchmark::State& state) {
    StringGeometry geom{10, 0.3};
    const StringParams params = mid_params();
    const CameraModel camera;
    const HandTrajectory hand = swing_trajectory(1.0);
    const StringState initial = init_hanging_state(hand.front().pose, geom, params);
    const auto states = simulate_rollout(params, geom, hand, initial, kDefaultDt);
    const FrameSeries series = capture_series(states, camera, 0.04);
    const PreparedObservation prepared(series, camera, MatchConfig{});
    for (auto _ : state) {
        auto report = matching_rate(states, prepared);
        benchmark::DoNotOptimize(report);
    }
}
BENCHMARK(BM_MatchingRatePrepared);

void BM_CandidateRolloutAndScore(benchmark::State& state) {
    // One estimation candidate: rollout plus prepared-observation scoring.
    StringGeometry geom{10, 0.3};
    const StringParams params = mid_params();
    const CameraModel camera;
    const HandTrajectory hand = swing_trajectory(1.0);
    const StringState initial = init_hanging_state(hand.front().pose, geom, params);
    const auto states = simulate_rollout(params, geom, hand, initial, kDefaultDt);
    const FrameSeries series = capture_series(states, camera, 0.04);
    const PreparedObservation prepared(series, camera, MatchConfig{});
    StringParams candidate = params;
    candidate.k_h *= 2.0;
    for (auto _ : state) {
        const StringState init =
            init_hanging_state(hand.front().pose, geom, candidate);
        auto rolled = simulate_rollout(candidate, geom, hand, init, kDefaultDt);
        auto report = matching_rate(rolled, prepared);
        benchmark::DoNotOptimize(report);
    }
}
BENCHMARK(BM_CandidateRolloutAndScore)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
