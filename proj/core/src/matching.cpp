#include "castsim/matching.hpp"

#include <algorithm>
#include <cmath>

#include "castsim/errors.hpp"

namespace castsim {

std::vector<double> point_weights(int n, double delta_w) {
    if (n < 1) throw ConfigError("point_weights: n must be >= 1");
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = 1.0 + i * delta_w;
    return w;
}

int tip_proximity_score(const Pixel& sim_tip, const Pixel& actual_tip,
                        const MatchConfig& config) {
    const int dist = std::max(std::abs(sim_tip.x - actual_tip.x),
                              std::abs(sim_tip.y - actual_tip.y));
    return std::max(0, config.p_max - dist / config.tip_bin_pixels);
}

double frame_score(const std::vector<Pixel>& sim_points, const ScoreField& field,
                   const Pixel& actual_tip, const std::vector<double>& weights,
                   const MatchConfig& config) {
    const int n = static_cast<int>(sim_points.size());
    if (n < 1 || weights.size() != sim_points.size())
        throw ConfigError("frame_score: weights/points mismatch");

    double numerator = 0.0;
    double weight_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        int score = 0;
        if (i + 1 == n) {
            score = tip_proximity_score(sim_points[i], actual_tip, config);
        } else {
            const Pixel& p = sim_points[i];
            if (p.x >= 0 && p.x < field.width && p.y >= 0 && p.y < field.height)
                score = field.at(p.x, p.y);
        }
        numerator += score * weights[i];
        weight_sum += weights[i];
    }
    return numerator / (config.p_max * weight_sum);
}

PreparedObservation::PreparedObservation(const FrameSeries& observed,
                                         const CameraModel& cam,
                                         const MatchConfig& cfg)
    : camera(cam), config(cfg) {
    if (observed.frames.empty()) throw ConfigError("matching_rate: empty series");
    fields.reserve(observed.frames.size());
    tips.reserve(observed.frames.size());
    timestamps.reserve(observed.frames.size());
    for (const BinaryFrame& frame : observed.frames) {
        fields.push_back(build_score_field(frame, cfg.p_max));
        tips.push_back(locate_tip(frame));
        timestamps.push_back(frame.timestamp);
    }
    pairing_tolerance =
        observed.sampling_period > 0 ? observed.sampling_period / 2 : 0.01;
}

MatchReport matching_rate(const std::vector<TimedState>& sim_states,
                          const PreparedObservation& prepared) {
    if (sim_states.empty()) throw AlignmentError("matching_rate: no simulated states");

    MatchReport report;
    report.per_frame.reserve(prepared.timestamps.size());
    std::vector<double> weights;
    std::vector<Pixel> px;
    std::size_t cursor = 0;
    for (std::size_t f = 0; f < prepared.timestamps.size(); ++f) {
        const double ts = prepared.timestamps[f];
        while (cursor + 1 < sim_states.size() &&
               std::fabs(sim_states[cursor + 1].time - ts) <=
                   std::fabs(sim_states[cursor].time - ts))
            ++cursor;
        if (std::fabs(sim_states[cursor].time - ts) > prepared.pairing_tolerance)
            throw AlignmentError("simulated states do not cover frame at t=" +
                                 std::to_string(ts));

        const auto& points = sim_states[cursor].state.positions;
        px.resize(points.size());
        for (std::size_t i = 0; i < points.size(); ++i)
            px[i] = prepared.camera.project(points[i]);
        if (weights.size() != points.size())
            weights = point_weights(static_cast<int>(points.size()),
                                    prepared.config.delta_w);
        report.per_frame.push_back(frame_score(px, prepared.fields[f],
                                               prepared.tips[f], weights,
                                               prepared.config));
    }
    report.frames_used = static_cast<int>(report.per_frame.size());
    double sum = 0.0;
    for (double e : report.per_frame) sum += e;
    report.rate = sum / report.frames_used;
    return report;
}

MatchReport matching_rate(const std::vector<TimedState>& sim_states,
                          const FrameSeries& observed, const CameraModel& camera,
                          const MatchConfig& config) {
    return matching_rate(sim_states, PreparedObservation(observed, camera, config));
}

}  // namespace castsim
