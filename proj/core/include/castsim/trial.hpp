#pragma once

#include <optional>
#include <string>

#include "castsim/scenario.hpp"

namespace castsim {

// One manipulation iteration of the loop: generate until simulated success,
// execute on the plant, judge, estimate.
struct IterationLog {
    int iteration = 0;
    MotionPlan plan;
    long long generation_attempts = 0;
    bool simulated_success = false;
    std::vector<TimedPoint> predicted_tip;  // learner-model tip path
    std::string frames_dir;                 // set by the output writer
    std::optional<double> real_success_time;
    std::optional<double> collision_time;
    double matching_pre = 0.0;   // executed motion scored under the params used
    double matching_post = 0.0;  // best score after estimation
    bool estimated = false;
    StringParams params_used;
    StringParams params_estimated;
    std::optional<std::string> error;

    // Kept in memory for overlay plots; not serialized.
    std::vector<TimedState> predicted_states;
    FrameSeries observed_frames;
    std::vector<TimedPoint> true_tip;
    HandTrajectory hand;
};

struct TrialLog {
    std::string scenario_name;
    std::uint64_t seed = 0;
    bool success = false;
    int iterations_used = 0;
    std::optional<double> success_time;
    std::optional<int> success_iteration;
    std::vector<IterationLog> iterations;
    double wall_clock_s = 0.0;  // reported separately, never serialized
};

struct GeneratedMotion {
    MotionPlan plan;
    long long attempts = 0;
    std::vector<TimedState> learner_states;
    std::vector<TimedPoint> predicted_tip;
};

// Draws plans (fresh for iteration 1, perturbations of prev_plan afterwards)
// until one passes limits, reaches the target in the learner simulation, and
// -- when an obstacle is present -- stays clear of it until the success
// sample. Plans are materialized in fixed-size batches so parallel evaluation
// leaves the RNG stream unchanged.
// Throws GenerationFailedError when max_generation_attempts is exhausted.
GeneratedMotion generate_until_simulated_success(
    const StringParams& params, const Scenario& scenario, Rng& rng,
    const std::optional<MotionPlan>& prev_plan, int iteration);

// The full loop: generate, execute, judge, estimate, repeat. Runtime errors
// inside an iteration are logged and count the iteration as failed;
// configuration problems throw before iteration 1.
TrialLog run_trial(const Scenario& scenario);

// Serialized form of run_trial's result (stable key order, no wall clock).
std::string trial_log_to_json(const TrialLog& log);

}  // namespace castsim
