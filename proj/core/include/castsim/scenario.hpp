#pragma once

#include <cstdint>
#include <string>

#include "castsim/arm.hpp"
#include "castsim/estimation.hpp"
#include "castsim/matching.hpp"
#include "castsim/plant.hpp"

namespace castsim {

// Everything one closed-loop trial needs. Field names in the JSON form carry
// explicit units (`*_m`, `*_s`, `*_rad`); every field has a default and may
// be omitted.
struct Scenario {
    std::string name = "unnamed";
    ArmConfig arm;
    StringGeometry learner_geometry{10, 0.3};
    PlantConfig plant;
    TargetSpec target;
    ObstacleSpec obstacle;
    CameraModel camera;
    MatchConfig match;
    ParamRange ranges;
    EstimationBudget budget;
    double chi_0 = 0.6;
    double beta = 0.995;
    int max_iterations = 10;
    int max_generation_attempts = 50000;
    int pose_restart_period = 5000;  // iteration-1 pose hold length
    int generation_batch = 256;      // plans materialized per parallel batch
    std::array<double, 2> t_range{0.2, 1.5};
    std::uint64_t seed = 0;
    double tail_s = 0.4;
    double sampling_period = 0.04;
    double dt = kDefaultDt;
    Vec2 gravity = kStandardGravity;
};

// Throws ConfigError describing every broken constraint at once.
void validate_scenario(const Scenario& scenario);

// JSON loader/saver. Parse errors are reported with line/column; semantic
// errors name the offending field.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text, const std::string& origin);
std::string scenario_to_json(const Scenario& scenario);

StringParams load_params_json(const std::string& path);
std::string params_to_json(const StringParams& params);

MotionPlan load_plan_json(const std::string& path);
std::string plan_to_json(const MotionPlan& plan);

}  // namespace castsim
