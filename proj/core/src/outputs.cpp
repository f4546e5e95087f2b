#include "castsim/outputs.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "castsim/errors.hpp"

namespace fs = std::filesystem;

namespace castsim {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Row runs of set pixels keep the SVG size reasonable.
void append_frame_pixels(std::ostringstream& svg, const BinaryFrame& frame) {
    for (int y = 0; y < frame.height; ++y) {
        int run_start = -1;
        for (int x = 0; x <= frame.width; ++x) {
            const bool set = x < frame.width && frame.at(x, y);
            if (set && run_start < 0) run_start = x;
            if (!set && run_start >= 0) {
                svg << "<rect x=\"" << run_start << "\" y=\"" << y << "\" width=\""
                    << (x - run_start) << "\" height=\"1\" fill=\"#444\"/>\n";
                run_start = -1;
            }
        }
    }
}

const TimedState* nearest_state(const std::vector<TimedState>& states, double t) {
    const TimedState* best = nullptr;
    double best_gap = 0.0;
    for (const TimedState& ts : states) {
        const double gap = std::fabs(ts.time - t);
        if (!best || gap < best_gap) {
            best = &ts;
            best_gap = gap;
        }
    }
    return best;
}

}  // namespace

void write_tip_csv(const std::vector<TimedPoint>& tip, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "t_s,x_m,y_m\n";
    for (const TimedPoint& tp : tip)
        out << fmt(tp.time) << "," << fmt(tp.point.x) << "," << fmt(tp.point.y)
            << "\n";
}

void write_hand_csv(const HandTrajectory& hand, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "t_s,x_m,y_m,theta_rad\n";
    for (const TimedPose& tp : hand)
        out << fmt(tp.time) << "," << fmt(tp.pose.position.x) << ","
            << fmt(tp.pose.position.y) << "," << fmt(tp.pose.orientation) << "\n";
}

HandTrajectory read_hand_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t_s,x_m,y_m", 0) != 0)
        throw ConfigError(path + ": expected header t_s,x_m,y_m,theta_rad");
    HandTrajectory hand;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        TimedPose tp;
        double theta = 0.0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &tp.time,
                        &tp.pose.position.x, &tp.pose.position.y, &theta) != 4)
            throw ConfigError(path + ": malformed row '" + line + "'");
        tp.pose.orientation = theta;
        hand.push_back(tp);
    }
    if (hand.empty()) throw ConfigError(path + ": no samples");
    // Velocities via the same forward differences the integrator's linear
    // interpolation implies.
    for (std::size_t i = 0; i + 1 < hand.size(); ++i) {
        const double dt = hand[i + 1].time - hand[i].time;
        if (dt <= 0) throw ConfigError(path + ": timestamps must increase");
        hand[i].pose.velocity =
            (1.0 / dt) * (hand[i + 1].pose.position - hand[i].pose.position);
        hand[i].pose.angular_velocity =
            wrap_angle(hand[i + 1].pose.orientation - hand[i].pose.orientation) / dt;
    }
    return hand;
}

std::string overlay_svg(const BinaryFrame& frame,
                        const std::vector<TimedState>& simulated,
                        const Scenario& scenario) {
    const CameraModel& cam = scenario.camera;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << frame.width
        << "\" height=\"" << frame.height << "\" viewBox=\"0 0 " << frame.width
        << " " << frame.height << "\">\n";
    svg << "<rect width=\"" << frame.width << "\" height=\"" << frame.height
        << "\" fill=\"white\"/>\n";

    if (scenario.obstacle.present) {
        const Pixel c = cam.project(
            {scenario.obstacle.corner.x,
             scenario.obstacle.corner.y + scenario.obstacle.height});
        svg << "<rect x=\"" << c.x << "\" y=\"" << c.y << "\" width=\""
            << fmt6(scenario.obstacle.width * cam.pixels_per_meter)
            << "\" height=\"" << fmt6(scenario.obstacle.height * cam.pixels_per_meter)
            << "\" fill=\"#e8a33d\" fill-opacity=\"0.6\"/>\n";
    }
    {
        const TargetSpec& t = scenario.target;
        const Pixel c = cam.project({t.x_ref - t.w, t.y_ref + t.h});
        svg << "<rect x=\"" << c.x << "\" y=\"" << c.y << "\" width=\""
            << fmt6(2 * t.w * cam.pixels_per_meter) << "\" height=\""
            << fmt6(2 * t.h * cam.pixels_per_meter)
            << "\" fill=\"none\" stroke=\"green\" stroke-width=\"2\"/>\n";
    }

    append_frame_pixels(svg, frame);

    if (const TimedState* ts = nearest_state(simulated, frame.timestamp)) {
        for (std::size_t i = 0; i < ts->state.positions.size(); ++i) {
            const Pixel p = cam.project(ts->state.positions[i]);
            const bool tip = i + 1 == ts->state.positions.size();
            svg << "<circle cx=\"" << p.x << "\" cy=\"" << p.y << "\" r=\""
                << (tip ? 4 : 3) << "\" fill=\"none\" stroke=\""
                << (tip ? "red" : "#d33") << "\" stroke-width=\"1.5\"/>\n";
        }
    }
    svg << "<circle cx=\"" << frame.grasp_pixel.x << "\" cy=\""
        << frame.grasp_pixel.y
        << "\" r=\"3\" fill=\"#36c\" fill-opacity=\"0.8\"/>\n";
    svg << "<text x=\"8\" y=\"18\" font-size=\"14\" fill=\"#333\">t="
        << fmt6(frame.timestamp) << " s</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

void write_trial_outputs(TrialLog& log, const Scenario& scenario,
                         const std::string& out_dir, bool with_overlays) {
    fs::create_directories(out_dir);

    for (IterationLog& il : log.iterations) {
        if (il.observed_frames.frames.empty()) continue;
        char sub[32];
        std::snprintf(sub, sizeof(sub), "frames/iter_%02d", il.iteration);
        il.frames_dir = sub;
        write_frame_series(il.observed_frames, (fs::path(out_dir) / sub).string());

        if (!with_overlays) continue;
        char odir[32];
        std::snprintf(odir, sizeof(odir), "overlay/iter_%02d", il.iteration);
        const fs::path overlay_dir = fs::path(out_dir) / odir;
        fs::create_directories(overlay_dir);
        std::ostringstream montage;
        const int cols = 5;
        const double scale = 0.2;
        const std::size_t count = il.observed_frames.frames.size();
        const int rows = static_cast<int>((count + cols - 1) / cols);
        montage << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
                << static_cast<int>(cols * scenario.camera.image_width * scale)
                << "\" height=\""
                << static_cast<int>(rows * scenario.camera.image_height * scale)
                << "\">\n";
        for (std::size_t k = 0; k < count; ++k) {
            const BinaryFrame& frame = il.observed_frames.frames[k];
            const std::string body = overlay_svg(frame, il.predicted_states, scenario);
            char name[32];
            std::snprintf(name, sizeof(name), "frame_%03zu.svg", k);
            std::ofstream out(overlay_dir / name);
            out << body;
            montage << "<g transform=\"translate("
                    << (k % cols) * scenario.camera.image_width * scale << ","
                    << (k / cols) * scenario.camera.image_height * scale
                    << ") scale(" << scale << ")\">\n"
                    << body << "</g>\n";
        }
        montage << "</svg>\n";
        std::ofstream mon(overlay_dir / "montage.svg");
        mon << montage.str();
    }

    // Final executed iteration backs the top-level CSVs.
    for (auto it = log.iterations.rbegin(); it != log.iterations.rend(); ++it) {
        if (it->true_tip.empty()) continue;
        write_tip_csv(it->true_tip, (fs::path(out_dir) / "tip.csv").string());
        write_hand_csv(it->hand, (fs::path(out_dir) / "hand.csv").string());
        break;
    }

    std::ofstream trial(fs::path(out_dir) / "trial.json");
    if (!trial) throw Error("cannot write trial.json under " + out_dir);
    trial << trial_log_to_json(log);
}

}  // namespace castsim
