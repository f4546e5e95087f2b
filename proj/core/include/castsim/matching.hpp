#pragma once

#include <vector>

#include "castsim/observation.hpp"

namespace castsim {

struct MatchConfig {
    int p_max = 8;
    double delta_w = 0.25;   // weighting increment toward the string end
    int tip_bin_pixels = 3;  // tip score loses one level per this many pixels
};

struct MatchReport {
    double rate = 0.0;  // E, mean of per_frame
    std::vector<double> per_frame;
    int frames_used = 0;
};

// w_i = 1 + (i-1) * delta_w, i = 1..n.
std::vector<double> point_weights(int n, double delta_w);

// max(0, p_max - floor(chessboard distance / bin)).
int tip_proximity_score(const Pixel& sim_tip, const Pixel& actual_tip,
                        const MatchConfig& config);

// Weighted normalized score of one frame: body points read the dilation
// field (0 outside the image), the last point scores by tip proximity.
double frame_score(const std::vector<Pixel>& sim_points, const ScoreField& field,
                   const Pixel& actual_tip, const std::vector<double>& weights,
                   const MatchConfig& config);

// Observation preprocessing shared by every candidate scored against the
// same series: one dilation field and one DFS tip per frame.
struct PreparedObservation {
    PreparedObservation(const FrameSeries& observed, const CameraModel& camera,
                        const MatchConfig& config);

    std::vector<ScoreField> fields;
    std::vector<Pixel> tips;
    std::vector<double> timestamps;
    double pairing_tolerance = 0.0;
    CameraModel camera;
    MatchConfig config;
};

MatchReport matching_rate(const std::vector<TimedState>& sim_states,
                          const PreparedObservation& prepared);

// Mean per-frame score of the simulated motion against the observed series.
// Each observed frame is paired with the nearest simulated state (within half
// a sampling period) and scored against its own dilation field and DFS tip.
MatchReport matching_rate(const std::vector<TimedState>& sim_states,
                          const FrameSeries& observed, const CameraModel& camera,
                          const MatchConfig& config);

}  // namespace castsim
