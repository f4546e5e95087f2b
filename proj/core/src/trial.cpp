#include "castsim/trial.hpp"

#include <chrono>
#include <cmath>

#include <json.hpp>

#include "castsim/errors.hpp"
#include "castsim/parallel.hpp"

using nlohmann::json;

namespace castsim {

namespace {

struct CandidateOutcome {
    bool passed = false;
    std::optional<double> success_time;
};

// A plan passes when it survives limit validation, its simulated tip enters
// the target box, and no simulated string/arm sample touches the obstacle at
// or before that moment (mirrors the plant-side judge).
CandidateOutcome evaluate_plan(const MotionPlan& plan, const StringParams& params,
                               const Scenario& scenario) {
    CandidateOutcome outcome;
    RealizedMotion motion;
    try {
        motion = realize_trajectory(plan, scenario.arm, scenario.tail_s);
    } catch (const LimitViolationError&) {
        return outcome;
    }
    std::vector<TimedState> states;
    try {
        const StringState initial =
            init_hanging_state(motion.hand.front().pose, scenario.learner_geometry,
                               params, scenario.gravity);
        states = simulate_rollout(params, scenario.learner_geometry, motion.hand,
                                  initial, scenario.dt, scenario.gravity);
    } catch (const DivergenceError&) {
        return outcome;
    }

    std::vector<TimedPoint> tip;
    tip.reserve(states.size());
    for (const TimedState& ts : states)
        tip.push_back({ts.time, ts.state.positions.back()});
    const std::optional<double> hit = check_success(tip, scenario.target);
    if (!hit) return outcome;

    if (scenario.obstacle.present) {
        const std::optional<double> collision = check_collision(
            states, motion.joint_angles, scenario.obstacle, scenario.arm);
        if (collision && *collision <= *hit) return outcome;
    }
    outcome.passed = true;
    outcome.success_time = hit;
    return outcome;
}

}  // namespace

GeneratedMotion generate_until_simulated_success(
    const StringParams& params, const Scenario& scenario, Rng& rng,
    const std::optional<MotionPlan>& prev_plan, int iteration) {
    if (iteration >= 2 && !prev_plan)
        throw ConfigError("perturbation requires the previous plan");

    std::array<double, 3> held_pose{};
    bool have_pose = false;
    std::vector<MotionPlan> batch;
    std::vector<CandidateOutcome> outcomes;

    long long attempt = 0;
    while (attempt < scenario.max_generation_attempts) {
        // Batch ends never straddle a pose-restart boundary.
        long long batch_end = std::min<long long>(
            attempt + scenario.generation_batch, scenario.max_generation_attempts);
        if (iteration == 1) {
            const long long next_restart =
                (attempt / scenario.pose_restart_period + 1) *
                static_cast<long long>(scenario.pose_restart_period);
            batch_end = std::min(batch_end, next_restart);
        }

        batch.clear();
        for (long long a = attempt; a < batch_end; ++a) {
            MotionPlan plan;
            if (iteration == 1) {
                plan = generate_motion(rng, scenario.arm, scenario.t_range);
                if (a % scenario.pose_restart_period == 0 || !have_pose) {
                    held_pose = plan.initial_angles;
                    have_pose = true;
                } else {
                    plan.initial_angles = held_pose;
                }
            } else {
                plan = perturb_motion(*prev_plan, rng, iteration, scenario.arm,
                                      scenario.t_range);
            }
            batch.push_back(plan);
        }

        outcomes.assign(batch.size(), {});
        parallel_for(batch.size(), [&](std::size_t i) {
            outcomes[i] = evaluate_plan(batch[i], params, scenario);
        });

        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            if (!outcomes[i].passed) continue;
            GeneratedMotion out;
            out.plan = batch[i];
            out.attempts = attempt + static_cast<long long>(i) + 1;
            const RealizedMotion motion =
                realize_trajectory(out.plan, scenario.arm, scenario.tail_s);
            const StringState initial = init_hanging_state(
                motion.hand.front().pose, scenario.learner_geometry, params,
                scenario.gravity);
            out.learner_states =
                simulate_rollout(params, scenario.learner_geometry, motion.hand,
                                 initial, scenario.dt, scenario.gravity);
            out.predicted_tip.reserve(out.learner_states.size());
            for (const TimedState& ts : out.learner_states)
                out.predicted_tip.push_back({ts.time, ts.state.positions.back()});
            return out;
        }
        attempt = batch_end;
    }
    throw GenerationFailedError("no plan reached the target in " +
                                std::to_string(scenario.max_generation_attempts) +
                                " attempts");
}

TrialLog run_trial(const Scenario& scenario) {
    validate_scenario(scenario);
    const auto t_start = std::chrono::steady_clock::now();

    TrialLog log;
    log.scenario_name = scenario.name;
    log.seed = scenario.seed;

    Rng rng(scenario.seed);
    SearchState search;
    search.chi_0 = scenario.chi_0;
    search.beta = scenario.beta;
    // First motion generation runs with every parameter at its range minimum.
    StringParams params = params_from_exponents(search.chi_best, scenario.ranges);

    std::optional<MotionPlan> prev_plan;
    for (int iteration = 1; iteration <= scenario.max_iterations; ++iteration) {
        IterationLog il;
        il.iteration = iteration;
        il.params_used = params;
        il.params_estimated = params;
        try {
            GeneratedMotion gen = generate_until_simulated_success(
                params, scenario, rng, prev_plan, iteration);
            il.plan = gen.plan;
            il.generation_attempts = gen.attempts;
            il.simulated_success = true;
            il.predicted_tip = std::move(gen.predicted_tip);
            il.predicted_states = std::move(gen.learner_states);
            prev_plan = gen.plan;

            ManipulationRecord record = execute_manipulation(
                gen.plan, scenario.plant, scenario.arm, scenario.camera,
                scenario.tail_s, scenario.sampling_period, scenario.dt,
                scenario.gravity);
            il.collision_time = check_collision(record.plant_states,
                                                record.joint_angles,
                                                scenario.obstacle, scenario.arm);
            std::optional<double> success = check_success(record.tip, scenario.target);
            if (success && il.collision_time && *il.collision_time < *success)
                success.reset();  // contact happened first: aborted manipulation
            il.real_success_time = success;
            il.true_tip = record.tip;
            il.hand = record.hand;

            // A collision invalidates everything the camera saw afterwards.
            FrameSeries observed = std::move(record.frames);
            if (il.collision_time) {
                std::size_t keep = 0;
                while (keep < observed.frames.size() &&
                       observed.frames[keep].timestamp <= *il.collision_time)
                    ++keep;
                observed.frames.resize(std::max<std::size_t>(keep, 1));
            }
            il.observed_frames = observed;

            if (success) {
                log.success = true;
                log.success_time = success;
                log.success_iteration = iteration;
                // Record the executed-motion score for the trend report even
                // though no estimation follows a successful cast.
                const StringState initial = init_hanging_state(
                    record.hand.front().pose, scenario.learner_geometry, params,
                    scenario.gravity);
                const auto states =
                    simulate_rollout(params, scenario.learner_geometry, record.hand,
                                     initial, scenario.dt, scenario.gravity);
                il.matching_pre =
                    matching_rate(states, observed, scenario.camera, scenario.match).rate;
                il.matching_post = il.matching_pre;
                log.iterations.push_back(std::move(il));
                break;
            }

            EstimationResult result = estimate(
                observed, record.hand, scenario.learner_geometry, search,
                scenario.ranges, scenario.budget, scenario.camera, scenario.match,
                rng, scenario.dt, scenario.gravity);
            search = result.state;
            search.manipulations += 1;  // M counts executed manipulations
            params = result.params;
            il.estimated = true;
            il.matching_pre = result.incumbent_rate;
            il.matching_post = result.report.rate;
            il.params_estimated = params;
        } catch (const Error& e) {
            il.error = e.what();
        }
        log.iterations.push_back(std::move(il));
    }

    log.iterations_used = static_cast<int>(log.iterations.size());
    log.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    return log;
}

std::string trial_log_to_json(const TrialLog& log) {
    json j;
    j["scenario"] = log.scenario_name;
    j["seed"] = log.seed;
    j["success"] = log.success;
    j["iterations_used"] = log.iterations_used;
    if (log.success_time) j["success_time_s"] = *log.success_time;
    if (log.success_iteration) j["success_iteration"] = *log.success_iteration;

    json iterations = json::array();
    for (const IterationLog& il : log.iterations) {
        json ji;
        ji["iteration"] = il.iteration;
        ji["generation_attempts"] = il.generation_attempts;
        ji["simulated_success"] = il.simulated_success;
        ji["plan"] = {{"initial_angles_rad", il.plan.initial_angles},
                      {"duration_s", il.plan.duration},
                      {"control_velocities_rad_s", il.plan.control_velocities}};
        auto params_obj = [](const StringParams& p) {
            return json{{"k_s", p.k_s},   {"c_s", p.c_s},   {"k_h", p.k_h},
                        {"c_h", p.c_h},   {"c_c1", p.c_c1}, {"c_c2", p.c_c2},
                        {"k_ph", p.k_ph}, {"c_ph", p.c_ph}};
        };
        ji["params_used"] = params_obj(il.params_used);
        ji["params_estimated"] = params_obj(il.params_estimated);
        ji["matching_pre"] = il.matching_pre;
        ji["matching_post"] = il.matching_post;
        ji["estimated"] = il.estimated;
        if (il.real_success_time) ji["real_success_time_s"] = *il.real_success_time;
        if (il.collision_time) ji["collision_time_s"] = *il.collision_time;
        if (!il.frames_dir.empty()) ji["frames_dir"] = il.frames_dir;
        if (il.error) ji["error"] = *il.error;
        json tip = json::array();
        for (const TimedPoint& tp : il.predicted_tip)
            tip.push_back({tp.time, tp.point.x, tp.point.y});
        ji["predicted_tip"] = std::move(tip);
        iterations.push_back(std::move(ji));
    }
    j["iterations"] = std::move(iterations);
    return j.dump(2) + "\n";
}

}  // namespace castsim
