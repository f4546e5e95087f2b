// Command-line front end: run closed-loop casting trials, re-run standalone
// estimation rounds, dump single rollouts, and validate scenario files.
//
// Exit codes: 0 success/valid, 1 trial failure, 2 configuration error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "castsim/errors.hpp"
#include "castsim/outputs.hpp"
#include "castsim/parallel.hpp"
#include "castsim/trial.hpp"

namespace fs = std::filesystem;
using namespace castsim;

namespace {

int cmd_run(const std::string& scenario_path, std::uint64_t seed, bool seed_set,
            const std::string& out_dir, bool overlays) {
    Scenario scenario = load_scenario(scenario_path);
    if (seed_set) scenario.seed = seed;

    std::printf("scenario '%s' seed %llu, %zu worker thread(s)\n",
                scenario.name.c_str(),
                static_cast<unsigned long long>(scenario.seed), worker_count());
    TrialLog log = run_trial(scenario);
    write_trial_outputs(log, scenario, out_dir, overlays);

    for (const IterationLog& il : log.iterations) {
        std::printf("iteration %d: attempts=%lld E_pre=%.4f E_post=%.4f%s%s%s\n",
                    il.iteration, il.generation_attempts, il.matching_pre,
                    il.matching_post,
                    il.real_success_time ? " SUCCESS" : "",
                    il.collision_time ? " COLLISION" : "",
                    il.error ? (" error: " + *il.error).c_str() : "");
    }
    std::printf("%s after %d iteration(s), wall clock %.1f s\n",
                log.success ? "success" : "failure", log.iterations_used,
                log.wall_clock_s);
    std::printf("outputs in %s\n", out_dir.c_str());
    return log.success ? 0 : 1;
}

int cmd_estimate(const std::string& frames_dir, const std::string& trajectory,
                 const std::string& scenario_path, int samples,
                 std::uint64_t seed, const std::string& out_file) {
    Scenario scenario =
        scenario_path.empty()
            ? parse_scenario(R"({"target": {"x_ref_m": 0, "y_ref_m": 0}})",
                             "defaults")
            : load_scenario(scenario_path);
    if (samples > 0) scenario.budget.samples = samples;

    const FrameSeries observed = read_frame_series(frames_dir);
    const HandTrajectory hand = read_hand_csv(trajectory);

    SearchState state;
    state.chi_0 = scenario.chi_0;
    state.beta = scenario.beta;
    Rng rng(seed);
    const EstimationResult result =
        estimate(observed, hand, scenario.learner_geometry, state,
                 scenario.ranges, scenario.budget, scenario.camera,
                 scenario.match, rng, scenario.dt, scenario.gravity);

    std::printf("incumbent E=%.4f best E=%.4f over %d candidates\n",
                result.incumbent_rate, result.report.rate,
                scenario.budget.samples);
    const std::string params_json = params_to_json(result.params);
    if (!out_file.empty()) {
        std::ofstream out(out_file);
        out << params_json;
        std::printf("estimated parameters written to %s\n", out_file.c_str());
    } else {
        std::fputs(params_json.c_str(), stdout);
    }
    return 0;
}

int cmd_simulate(const std::string& params_path, const std::string& plan_path,
                 const std::string& scenario_path, const std::string& out_dir,
                 bool with_frames) {
    Scenario scenario =
        scenario_path.empty()
            ? parse_scenario(R"({"target": {"x_ref_m": 0, "y_ref_m": 0}})",
                             "defaults")
            : load_scenario(scenario_path);
    const StringParams params = load_params_json(params_path);
    const MotionPlan plan = load_plan_json(plan_path);

    const RealizedMotion motion =
        realize_trajectory(plan, scenario.arm, scenario.tail_s);
    const StringState initial =
        init_hanging_state(motion.hand.front().pose, scenario.learner_geometry,
                           params, scenario.gravity);
    const auto states =
        simulate_rollout(params, scenario.learner_geometry, motion.hand, initial,
                         scenario.dt, scenario.gravity);

    fs::create_directories(out_dir);
    std::vector<TimedPoint> tip;
    tip.reserve(states.size());
    for (const TimedState& ts : states)
        tip.push_back({ts.time, ts.state.positions.back()});
    write_tip_csv(tip, (fs::path(out_dir) / "tip.csv").string());
    write_hand_csv(motion.hand, (fs::path(out_dir) / "hand.csv").string());
    if (with_frames) {
        const FrameSeries series =
            capture_series(states, scenario.camera, scenario.sampling_period);
        write_frame_series(series, (fs::path(out_dir) / "frames").string());
    }
    std::printf("rollout of %zu samples written to %s\n", states.size(),
                out_dir.c_str());
    return 0;
}

int cmd_validate(const std::string& scenario_path) {
    const Scenario scenario = load_scenario(scenario_path);
    std::printf("%s: valid scenario '%s'\n", scenario_path.c_str(),
                scenario.name.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"castsim: closed-loop casting manipulation workbench"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = "out", frames_dir, trajectory;
    std::string params_path, plan_path, params_out;
    std::uint64_t seed = 0;
    bool no_overlays = false, with_frames = false;
    int samples = 0;

    auto* run = app.add_subcommand("run", "execute a closed-loop casting trial");
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    auto* seed_opt = run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--out", out_dir, "output directory (default: out)");
    run->add_flag("--no-overlays", no_overlays, "skip SVG overlay rendering");

    auto* est = app.add_subcommand("estimate", "one standalone estimation round");
    est->add_option("frames", frames_dir, "directory with frames.idx + PGMs")
        ->required();
    est->add_option("trajectory", trajectory, "executed hand trajectory CSV")
        ->required();
    est->add_option("--scenario", scenario_path,
                    "scenario file for geometry/ranges/camera");
    est->add_option("--samples", samples, "candidate budget for the round");
    est->add_option("--seed", seed, "RNG seed");
    est->add_option("--out", params_out, "write estimated parameters here");

    auto* sim = app.add_subcommand("simulate", "dump a single rollout");
    sim->add_option("params", params_path, "string parameter JSON")->required();
    sim->add_option("plan", plan_path, "motion plan JSON")->required();
    sim->add_option("--scenario", scenario_path,
                    "scenario file for arm/camera settings");
    sim->add_option("--out", out_dir, "output directory (default: out)");
    sim->add_flag("--frames", with_frames, "also rasterize PGM frames");

    auto* val = app.add_subcommand("validate", "check a scenario file");
    val->add_option("scenario", scenario_path, "scenario JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(scenario_path, seed, !seed_opt->empty(), out_dir,
                           !no_overlays);
        if (est->parsed())
            return cmd_estimate(frames_dir, trajectory, scenario_path, samples,
                                seed, params_out);
        if (sim->parsed())
            return cmd_simulate(params_path, plan_path, scenario_path, out_dir,
                                with_frames);
        if (val->parsed()) return cmd_validate(scenario_path);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
