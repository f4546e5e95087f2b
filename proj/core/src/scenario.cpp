#include "castsim/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "castsim/errors.hpp"

using nlohmann::json;

namespace castsim {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// nlohmann reports byte offsets; convert to line:column for diagnostics.
std::string line_anchor(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + line_anchor(text, e.byte) + ": " +
                          e.what());
    }
}

double get_num(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number())
        throw ConfigError(std::string("field '") + key + "' must be a number");
    return j[key].get<double>();
}

int get_int(const json& j, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer())
        throw ConfigError(std::string("field '") + key + "' must be an integer");
    return j[key].get<int>();
}

Vec2 get_vec2(const json& j, const char* key, Vec2 fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j[key];
    if (!v.is_array() || v.size() != 2)
        throw ConfigError(std::string("field '") + key + "' must be [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
}

StringParams params_from_json(const json& j, const StringParams& fallback) {
    StringParams p = fallback;
    p.k_s = get_num(j, "k_s", p.k_s);
    p.c_s = get_num(j, "c_s", p.c_s);
    p.k_h = get_num(j, "k_h", p.k_h);
    p.c_h = get_num(j, "c_h", p.c_h);
    p.c_c1 = get_num(j, "c_c1", p.c_c1);
    p.c_c2 = get_num(j, "c_c2", p.c_c2);
    p.k_ph = get_num(j, "k_ph", p.k_ph);
    p.c_ph = get_num(j, "c_ph", p.c_ph);
    return p;
}

json params_to_json_obj(const StringParams& p) {
    return json{{"k_s", p.k_s},   {"c_s", p.c_s},   {"k_h", p.k_h},
                {"c_h", p.c_h},   {"c_c1", p.c_c1}, {"c_c2", p.c_c2},
                {"k_ph", p.k_ph}, {"c_ph", p.c_ph}};
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
    const json j = parse_text(text, origin);
    Scenario s;
    // Hidden plant defaults to mid-range parameters so a bare file still runs.
    std::array<double, 8> mid;
    mid.fill(0.5);
    s.plant.hidden_params = params_from_exponents(mid, s.ranges);
    s.plant.plant_geometry = s.learner_geometry;

    if (j.contains("name")) s.name = j["name"].get<std::string>();
    s.seed = static_cast<std::uint64_t>(get_num(j, "seed", 0));
    s.max_iterations = get_int(j, "max_iterations", s.max_iterations);
    s.max_generation_attempts =
        get_int(j, "max_generation_attempts", s.max_generation_attempts);
    s.pose_restart_period = get_int(j, "pose_restart_period", s.pose_restart_period);
    s.generation_batch = get_int(j, "generation_batch", s.generation_batch);
    s.tail_s = get_num(j, "tail_s", s.tail_s);
    s.sampling_period = get_num(j, "sampling_period_s", s.sampling_period);
    s.dt = get_num(j, "dt_s", s.dt);
    s.gravity = get_vec2(j, "gravity_m_s2", s.gravity);
    if (j.contains("t_range_s")) {
        const json& r = j["t_range_s"];
        if (!r.is_array() || r.size() != 2)
            throw ConfigError("t_range_s must be [min, max]");
        s.t_range = {r[0].get<double>(), r[1].get<double>()};
    }

    if (j.contains("arm")) {
        const json& a = j["arm"];
        if (a.contains("link_lengths_m")) {
            const json& l = a["link_lengths_m"];
            if (!l.is_array() || l.size() != 3)
                throw ConfigError("arm.link_lengths_m must have 3 entries");
            for (int i = 0; i < 3; ++i) s.arm.link_lengths[i] = l[i].get<double>();
        }
        if (a.contains("joint_limits_rad")) {
            const json& l = a["joint_limits_rad"];
            if (!l.is_array() || l.size() != 3)
                throw ConfigError("arm.joint_limits_rad must have 3 [min,max] pairs");
            for (int i = 0; i < 3; ++i) {
                if (!l[i].is_array() || l[i].size() != 2)
                    throw ConfigError("arm.joint_limits_rad entries must be [min,max]");
                s.arm.joint_limits[i] = {l[i][0].get<double>(), l[i][1].get<double>()};
            }
        }
        s.arm.joint_velocity_limit =
            get_num(a, "joint_velocity_limit_rad_s", s.arm.joint_velocity_limit);
        s.arm.joint_acceleration_limit = get_num(a, "joint_acceleration_limit_rad_s2",
                                                 s.arm.joint_acceleration_limit);
        s.arm.composite_speed_limit =
            get_num(a, "composite_speed_limit_m_s", s.arm.composite_speed_limit);
        s.arm.command_period = get_num(a, "command_period_s", s.arm.command_period);
        s.arm.base_position = get_vec2(a, "base_position_m", s.arm.base_position);
        s.arm.perturbation_fraction =
            get_num(a, "perturbation_fraction", s.arm.perturbation_fraction);
    }

    if (j.contains("learner_string")) {
        const json& g = j["learner_string"];
        s.learner_geometry.n = get_int(g, "n", s.learner_geometry.n);
        s.learner_geometry.total_length =
            get_num(g, "total_length_m", s.learner_geometry.total_length);
        s.plant.plant_geometry = s.learner_geometry;
    }

    if (j.contains("plant")) {
        const json& p = j["plant"];
        if (p.contains("hidden_params"))
            s.plant.hidden_params =
                params_from_json(p["hidden_params"], s.plant.hidden_params);
        s.plant.plant_geometry.n = get_int(p, "n", s.plant.plant_geometry.n);
        s.plant.plant_geometry.total_length =
            get_num(p, "total_length_m", s.plant.plant_geometry.total_length);
        if (p.contains("mismatch_mode")) {
            const std::string mode = p["mismatch_mode"].get<std::string>();
            if (mode == "none")
                s.plant.mismatch_mode = MismatchMode::none;
            else if (mode == "geometry")
                s.plant.mismatch_mode = MismatchMode::geometry;
            else if (mode == "stiffening")
                s.plant.mismatch_mode = MismatchMode::stiffening;
            else
                throw ConfigError("plant.mismatch_mode must be none|geometry|stiffening");
        }
        s.plant.stiffening_kappa =
            get_num(p, "stiffening_kappa", s.plant.stiffening_kappa);
    }

    if (j.contains("target")) {
        const json& t = j["target"];
        if (!t.contains("x_ref_m") || !t.contains("y_ref_m"))
            throw ConfigError("target requires x_ref_m and y_ref_m");
        s.target.x_ref = t["x_ref_m"].get<double>();
        s.target.y_ref = t["y_ref_m"].get<double>();
        s.target.w = get_num(t, "w_m", s.target.w);
        s.target.h = get_num(t, "h_m", s.target.h);
    } else {
        throw ConfigError("scenario requires a target");
    }

    if (j.contains("obstacle")) {
        const json& o = j["obstacle"];
        s.obstacle.present = o.value("present", true);
        s.obstacle.corner = get_vec2(o, "corner_m", s.obstacle.corner);
        s.obstacle.width = get_num(o, "width_m", s.obstacle.width);
        s.obstacle.height = get_num(o, "height_m", s.obstacle.height);
    }

    if (j.contains("camera")) {
        const json& c = j["camera"];
        s.camera.pixels_per_meter = get_num(c, "pixels_per_meter", s.camera.pixels_per_meter);
        s.camera.image_width = get_int(c, "image_width", s.camera.image_width);
        s.camera.image_height = get_int(c, "image_height", s.camera.image_height);
        s.camera.world_origin_pixel =
            get_vec2(c, "world_origin_pixel", s.camera.world_origin_pixel);
        s.camera.stroke_thickness = get_int(c, "stroke_thickness", s.camera.stroke_thickness);
    }

    if (j.contains("match")) {
        const json& m = j["match"];
        s.match.p_max = get_int(m, "p_max", s.match.p_max);
        s.match.delta_w = get_num(m, "delta_w", s.match.delta_w);
        s.match.tip_bin_pixels = get_int(m, "tip_bin_pixels", s.match.tip_bin_pixels);
    }

    if (j.contains("estimation")) {
        const json& e = j["estimation"];
        s.budget.samples = get_int(e, "samples", s.budget.samples);
        s.chi_0 = get_num(e, "chi_0", s.chi_0);
        s.beta = get_num(e, "beta", s.beta);
        if (e.contains("ranges")) {
            static constexpr const char* names[8] = {"k_s",  "c_s",  "k_h",
                                                     "c_h",  "c_c1", "c_c2",
                                                     "k_ph", "c_ph"};
            for (int i = 0; i < 8; ++i) {
                if (!e["ranges"].contains(names[i])) continue;
                const json& r = e["ranges"][names[i]];
                if (!r.is_array() || r.size() != 2)
                    throw ConfigError(std::string("estimation.ranges.") + names[i] +
                                      " must be [min, max]");
                s.ranges.bounds[i] = {r[0].get<double>(), r[1].get<double>()};
            }
        }
    }

    validate_scenario(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    return parse_scenario(read_file(path), path);
}

void validate_scenario(const Scenario& s) {
    std::ostringstream problems;
    auto complain = [&](const std::string& msg) { problems << "  - " << msg << "\n"; };

    if (s.max_iterations < 1) complain("max_iterations must be >= 1");
    if (s.max_generation_attempts < 1) complain("max_generation_attempts must be >= 1");
    if (s.pose_restart_period < 1) complain("pose_restart_period must be >= 1");
    if (s.generation_batch < 1) complain("generation_batch must be >= 1");
    if (s.learner_geometry.n < 2) complain("learner string needs >= 2 mass points");
    if (s.plant.plant_geometry.n < 2) complain("plant string needs >= 2 mass points");
    if (s.learner_geometry.total_length <= 0) complain("string length must be positive");
    if (!s.plant.hidden_params.all_positive())
        complain("plant hidden parameters must all be positive");
    if (!s.ranges.valid()) complain("parameter ranges must satisfy 0 < min < max");
    if (s.budget.samples < 1) complain("estimation sample budget must be >= 1");
    if (!(s.chi_0 > 0)) complain("chi_0 must be positive");
    if (!(s.beta > 0 && s.beta < 1)) complain("beta must lie in (0, 1)");
    if (s.target.w <= 0 || s.target.h <= 0) complain("target tolerances must be positive");
    if (s.obstacle.present && (s.obstacle.width < 0 || s.obstacle.height < 0))
        complain("obstacle extents must be non-negative");
    if (s.dt <= 0 || s.dt > s.arm.command_period) complain("dt must be in (0, command_period]");
    if (s.tail_s < 0) complain("tail_s must be non-negative");
    if (s.sampling_period <= 0) complain("sampling_period_s must be positive");
    if (!(s.t_range[0] > 0 && s.t_range[0] < s.t_range[1]))
        complain("t_range_s must satisfy 0 < min < max");
    for (double l : s.arm.link_lengths)
        if (l <= 0) complain("link lengths must be positive");
    for (const auto& lim : s.arm.joint_limits)
        if (!(lim[0] < lim[1])) complain("joint limits must satisfy min < max");
    if (s.arm.joint_velocity_limit <= 0 || s.arm.joint_acceleration_limit <= 0 ||
        s.arm.composite_speed_limit <= 0)
        complain("arm velocity/acceleration/speed limits must be positive");
    if (s.arm.command_period <= 0) complain("command_period_s must be positive");
    if (s.camera.pixels_per_meter <= 0) complain("camera scale must be positive");
    if (s.camera.image_width < 16 || s.camera.image_height < 16)
        complain("camera image must be at least 16x16");
    if (s.match.p_max < 1) complain("match.p_max must be >= 1");
    if (s.match.delta_w < 0) complain("match.delta_w must be >= 0");
    if (s.match.tip_bin_pixels < 1) complain("match.tip_bin_pixels must be >= 1");

    const std::string all = problems.str();
    if (!all.empty()) throw ConfigError("invalid scenario:\n" + all);
}

std::string scenario_to_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["seed"] = s.seed;
    j["max_iterations"] = s.max_iterations;
    j["max_generation_attempts"] = s.max_generation_attempts;
    j["pose_restart_period"] = s.pose_restart_period;
    j["generation_batch"] = s.generation_batch;
    j["tail_s"] = s.tail_s;
    j["sampling_period_s"] = s.sampling_period;
    j["dt_s"] = s.dt;
    j["gravity_m_s2"] = {s.gravity.x, s.gravity.y};
    j["t_range_s"] = {s.t_range[0], s.t_range[1]};
    j["arm"] = {
        {"link_lengths_m", s.arm.link_lengths},
        {"joint_limits_rad", s.arm.joint_limits},
        {"joint_velocity_limit_rad_s", s.arm.joint_velocity_limit},
        {"joint_acceleration_limit_rad_s2", s.arm.joint_acceleration_limit},
        {"composite_speed_limit_m_s", s.arm.composite_speed_limit},
        {"command_period_s", s.arm.command_period},
        {"base_position_m", {s.arm.base_position.x, s.arm.base_position.y}},
        {"perturbation_fraction", s.arm.perturbation_fraction}};
    j["learner_string"] = {{"n", s.learner_geometry.n},
                           {"total_length_m", s.learner_geometry.total_length}};
    const char* mode = s.plant.mismatch_mode == MismatchMode::none ? "none"
                       : s.plant.mismatch_mode == MismatchMode::geometry
                           ? "geometry"
                           : "stiffening";
    j["plant"] = {{"hidden_params", params_to_json_obj(s.plant.hidden_params)},
                  {"n", s.plant.plant_geometry.n},
                  {"total_length_m", s.plant.plant_geometry.total_length},
                  {"mismatch_mode", mode},
                  {"stiffening_kappa", s.plant.stiffening_kappa}};
    j["target"] = {{"x_ref_m", s.target.x_ref},
                   {"y_ref_m", s.target.y_ref},
                   {"w_m", s.target.w},
                   {"h_m", s.target.h}};
    if (s.obstacle.present)
        j["obstacle"] = {{"present", true},
                         {"corner_m", {s.obstacle.corner.x, s.obstacle.corner.y}},
                         {"width_m", s.obstacle.width},
                         {"height_m", s.obstacle.height}};
    j["camera"] = {{"pixels_per_meter", s.camera.pixels_per_meter},
                   {"image_width", s.camera.image_width},
                   {"image_height", s.camera.image_height},
                   {"world_origin_pixel",
                    {s.camera.world_origin_pixel.x, s.camera.world_origin_pixel.y}},
                   {"stroke_thickness", s.camera.stroke_thickness}};
    j["match"] = {{"p_max", s.match.p_max},
                  {"delta_w", s.match.delta_w},
                  {"tip_bin_pixels", s.match.tip_bin_pixels}};
    json ranges;
    static constexpr const char* names[8] = {"k_s",  "c_s",  "k_h",  "c_h",
                                             "c_c1", "c_c2", "k_ph", "c_ph"};
    for (int i = 0; i < 8; ++i) ranges[names[i]] = s.ranges.bounds[i];
    j["estimation"] = {{"samples", s.budget.samples},
                       {"chi_0", s.chi_0},
                       {"beta", s.beta},
                       {"ranges", ranges}};
    return j.dump(2) + "\n";
}

StringParams load_params_json(const std::string& path) {
    const std::string text = read_file(path);
    const json j = parse_text(text, path);
    StringParams defaults;
    StringParams p = params_from_json(j, defaults);
    if (!p.all_positive())
        throw ConfigError(path + ": all eight string parameters must be positive");
    return p;
}

std::string params_to_json(const StringParams& params) {
    return params_to_json_obj(params).dump(2) + "\n";
}

MotionPlan load_plan_json(const std::string& path) {
    const std::string text = read_file(path);
    const json j = parse_text(text, path);
    MotionPlan plan;
    if (!j.contains("initial_angles_rad") || !j.contains("duration_s") ||
        !j.contains("control_velocities_rad_s"))
        throw ConfigError(path +
                          ": plan requires initial_angles_rad, duration_s, "
                          "control_velocities_rad_s");
    const json& a = j["initial_angles_rad"];
    if (!a.is_array() || a.size() != 3)
        throw ConfigError(path + ": initial_angles_rad must have 3 entries");
    for (int i = 0; i < 3; ++i) plan.initial_angles[i] = a[i].get<double>();
    plan.duration = j["duration_s"].get<double>();
    const json& cv = j["control_velocities_rad_s"];
    if (!cv.is_array() || cv.size() != 3)
        throw ConfigError(path + ": control_velocities_rad_s must have 3 rows");
    for (int jnt = 0; jnt < 3; ++jnt) {
        if (!cv[jnt].is_array() || cv[jnt].size() != 6)
            throw ConfigError(path + ": each control row must have 6 values");
        for (int k = 0; k < 6; ++k)
            plan.control_velocities[jnt][k] = cv[jnt][k].get<double>();
        if (plan.control_velocities[jnt][0] != 0.0 ||
            plan.control_velocities[jnt][5] != 0.0)
            throw ConfigError(path + ": control velocities V_0 and V_5 must be 0");
    }
    return plan;
}

std::string plan_to_json(const MotionPlan& plan) {
    json j;
    j["initial_angles_rad"] = plan.initial_angles;
    j["duration_s"] = plan.duration;
    j["control_velocities_rad_s"] = plan.control_velocities;
    return j.dump(2) + "\n";
}

}  // namespace castsim
