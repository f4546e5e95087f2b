#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "castsim/string_model.hpp"

namespace castsim {

// Virtual camera standing in for the real one: fixed scale, y up in world,
// rows growing downward in the image.
struct CameraModel {
    double pixels_per_meter = 300.0;
    int image_width = 600;
    int image_height = 600;
    // Pixel of world (0, 0); the default window spans x in [-0.8, 1.2],
    // y in [-0.6, 1.4], covering the arm's reachable disc around (0.3, 0.3).
    Vec2 world_origin_pixel{240.0, 420.0};
    int stroke_thickness = 3;

    struct Pixel {
        int x = 0;
        int y = 0;
    };

    Pixel project(const Vec2& world) const {
        return {static_cast<int>(std::lround(world_origin_pixel.x +
                                             world.x * pixels_per_meter)),
                static_cast<int>(std::lround(world_origin_pixel.y -
                                             world.y * pixels_per_meter))};
    }

    bool inside(const Pixel& p) const {
        return p.x >= 0 && p.x < image_width && p.y >= 0 && p.y < image_height;
    }
};

using Pixel = CameraModel::Pixel;

struct BinaryFrame {
    double timestamp = 0.0;
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // row-major, 0/1
    Pixel grasp_pixel;

    std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }
    void set(int x, int y) { bits[static_cast<std::size_t>(y) * width + x] = 1; }
};

// p_max on string pixels, one less per 8-neighborhood dilation ring, zero
// beyond ring p_max-1. Equivalent to the capped chessboard distance
// transform.
struct ScoreField {
    int width = 0;
    int height = 0;
    int p_max = 0;
    std::vector<std::uint16_t> scores;  // row-major

    int at(int x, int y) const { return scores[static_cast<std::size_t>(y) * width + x]; }
};

struct FrameSeries {
    std::vector<BinaryFrame> frames;
    double sampling_period = 0.0;
};

// Draws the polyline through the mass points with the camera's stroke
// thickness; pixels falling outside the image are clipped silently.
// Throws FrameOutOfViewError when the grasp point projects outside.
BinaryFrame rasterize(const std::vector<Vec2>& points, const CameraModel& camera,
                      double timestamp);

ScoreField build_score_field(const BinaryFrame& frame, int p_max);

// Far end of the string component: graph search over 8-connected set pixels
// from the grasp pixel with fixed neighbor order (N, NE, E, SE, S, SW, W,
// NW); returns the pixel at maximal path distance from the grasp, ties going
// to the latest one reached. Deterministic.
// Throws TipNotFoundError when the grasp pixel is not set.
Pixel locate_tip(const BinaryFrame& frame);

// Rasterizes the states nearest to each multiple of sampling_period across
// the covered window.
FrameSeries capture_series(const std::vector<TimedState>& states,
                           const CameraModel& camera, double sampling_period);

// P5 PGM, maxval 255: background 0, string 255.
void write_pgm(const BinaryFrame& frame, const std::string& path);
BinaryFrame read_pgm(const std::string& path);

// Frame dumps plus `frames.idx` lines: <frame> <timestamp> <grasp-px> <grasp-py>.
void write_frame_series(const FrameSeries& series, const std::string& directory);
FrameSeries read_frame_series(const std::string& directory);

}  // namespace castsim
