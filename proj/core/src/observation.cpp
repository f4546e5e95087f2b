#include "castsim/observation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "castsim/errors.hpp"

namespace fs = std::filesystem;

namespace castsim {

namespace {

// Stamp a stroke x stroke square (the chessboard disc) centered on (cx, cy).
void stamp(BinaryFrame& frame, int cx, int cy, int stroke) {
    const int lo = -(stroke - 1) / 2;
    const int hi = stroke / 2;
    for (int oy = lo; oy <= hi; ++oy) {
        const int y = cy + oy;
        if (y < 0 || y >= frame.height) continue;
        for (int ox = lo; ox <= hi; ++ox) {
            const int x = cx + ox;
            if (x >= 0 && x < frame.width) frame.set(x, y);
        }
    }
}

// Liang-Barsky clip of the parametric segment a + t(b-a) to a rectangle.
bool clip_segment(Vec2& a, Vec2& b, double xmin, double xmax, double ymin,
                  double ymax) {
    double t0 = 0.0, t1 = 1.0;
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x - xmin, xmax - a.x, a.y - ymin, ymax - a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;
        } else {
            const double r = q[i] / p[i];
            if (p[i] < 0.0) {
                if (r > t1) return false;
                if (r > t0) t0 = r;
            } else {
                if (r < t0) return false;
                if (r < t1) t1 = r;
            }
        }
    }
    const Vec2 a0 = a;
    a = {a0.x + t0 * dx, a0.y + t0 * dy};
    b = {a0.x + t1 * dx, a0.y + t1 * dy};
    return true;
}

void draw_segment(BinaryFrame& frame, const CameraModel& camera, Vec2 pa,
                  Vec2 pb) {
    const double margin = camera.stroke_thickness + 1.0;
    if (!clip_segment(pa, pb, -margin, frame.width + margin, -margin,
                      frame.height + margin))
        return;
    int x0 = static_cast<int>(std::lround(pa.x));
    int y0 = static_cast<int>(std::lround(pa.y));
    const int x1 = static_cast<int>(std::lround(pb.x));
    const int y1 = static_cast<int>(std::lround(pb.y));
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
        stamp(frame, x0, y0, camera.stroke_thickness);
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

// Continuous pixel coordinates, clamped so later rounding cannot overflow.
Vec2 project_continuous(const CameraModel& camera, const Vec2& world) {
    constexpr double bound = 1e8;
    const double px = camera.world_origin_pixel.x + world.x * camera.pixels_per_meter;
    const double py = camera.world_origin_pixel.y - world.y * camera.pixels_per_meter;
    return {std::clamp(px, -bound, bound), std::clamp(py, -bound, bound)};
}

}  // namespace

BinaryFrame rasterize(const std::vector<Vec2>& points, const CameraModel& camera,
                      double timestamp) {
    if (points.empty()) throw InvalidStateError("rasterize: no points");
    for (const Vec2& p : points)
        if (!finite(p)) throw InvalidStateError("rasterize: non-finite point");

    BinaryFrame frame;
    frame.timestamp = timestamp;
    frame.width = camera.image_width;
    frame.height = camera.image_height;
    frame.bits.assign(static_cast<std::size_t>(frame.width) * frame.height, 0);
    frame.grasp_pixel = camera.project(points.front());
    if (!camera.inside(frame.grasp_pixel))
        throw FrameOutOfViewError("grasp point projects outside the image");

    std::vector<Vec2> px(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        px[i] = project_continuous(camera, points[i]);

    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        draw_segment(frame, camera, px[i], px[i + 1]);
    for (const Vec2& p : px)
        stamp(frame, static_cast<int>(std::lround(p.x)),
              static_cast<int>(std::lround(p.y)), camera.stroke_thickness);
    return frame;
}

ScoreField build_score_field(const BinaryFrame& frame, int p_max) {
    if (p_max < 1) throw ConfigError("p_max must be >= 1");
    ScoreField field;
    field.width = frame.width;
    field.height = frame.height;
    field.p_max = p_max;
    field.scores.assign(frame.bits.size(), 0);

    // Multi-source ring expansion; round d stamps score p_max - d.
    std::vector<std::size_t> ring;
    ring.reserve(frame.bits.size() / 8 + 1);
    for (std::size_t i = 0; i < frame.bits.size(); ++i)
        if (frame.bits[i]) {
            field.scores[i] = static_cast<std::uint16_t>(p_max);
            ring.push_back(i);
        }

    const int w = frame.width, h = frame.height;
    std::vector<std::size_t> next;
    for (int score = p_max - 1; score >= 1 && !ring.empty(); --score) {
        next.clear();
        for (std::size_t idx : ring) {
            const int x = static_cast<int>(idx % w);
            const int y = static_cast<int>(idx / w);
            for (int oy = -1; oy <= 1; ++oy)
                for (int ox = -1; ox <= 1; ++ox) {
                    const int nx = x + ox, ny = y + oy;
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    const std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
                    if (field.scores[ni] == 0 && !frame.bits[ni]) {
                        field.scores[ni] = static_cast<std::uint16_t>(score);
                        next.push_back(ni);
                    }
                }
        }
        ring.swap(next);
    }
    return field;
}

Pixel locate_tip(const BinaryFrame& frame) {
    const int w = frame.width, h = frame.height;
    const Pixel start = frame.grasp_pixel;
    if (start.x < 0 || start.x >= w || start.y < 0 || start.y >= h ||
        !frame.at(start.x, start.y))
        throw TipNotFoundError("grasp pixel is not on the string");

    // N, NE, E, SE, S, SW, W, NW in image coordinates (y grows downward).
    static constexpr int kDx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
    static constexpr int kDy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

    // Farthest pixel from the grasp by within-component path distance.
    // (A depth-first tree depth is not usable here: inside a stroke-thick
    // band the exploration snakes, so its deepest node can sit far from the
    // string's end. Level-order distance is thickness-robust and keeps the
    // fixed neighbor order deterministic; equal distances resolve to the
    // latest pixel dequeued.)
    std::vector<std::int32_t> dist(frame.bits.size(), -1);
    std::vector<std::int32_t> queue;
    queue.reserve(1024);
    dist[static_cast<std::size_t>(start.y) * w + start.x] = 0;
    queue.push_back(start.y * w + start.x);

    Pixel best = start;
    std::int32_t best_dist = -1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::int32_t idx = queue[head];
        const int x = idx % w, y = idx / w;
        if (dist[idx] >= best_dist) {
            best_dist = dist[idx];
            best = {x, y};
        }
        for (int k = 0; k < 8; ++k) {
            const int nx = x + kDx[k], ny = y + kDy[k];
            if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
            const std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
            if (dist[ni] >= 0 || !frame.bits[ni]) continue;
            dist[ni] = dist[idx] + 1;
            queue.push_back(static_cast<std::int32_t>(ni));
        }
    }
    return best;
}

FrameSeries capture_series(const std::vector<TimedState>& states,
                           const CameraModel& camera, double sampling_period) {
    if (states.empty()) throw InvalidStateError("capture_series: no states");
    if (sampling_period <= 0.0) throw ConfigError("sampling period must be positive");

    FrameSeries series;
    series.sampling_period = sampling_period;
    const double t0 = states.front().time;
    const double window = states.back().time - t0;
    const int count = static_cast<int>(std::floor(window / sampling_period + 1e-9)) + 1;
    series.frames.reserve(count);

    std::size_t cursor = 0;
    for (int k = 0; k < count; ++k) {
        const double target = t0 + k * sampling_period;
        while (cursor + 1 < states.size() &&
               std::fabs(states[cursor + 1].time - target) <=
                   std::fabs(states[cursor].time - target))
            ++cursor;
        series.frames.push_back(
            rasterize(states[cursor].state.positions, camera, states[cursor].time));
    }
    return series;
}

void write_pgm(const BinaryFrame& frame, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
    std::vector<unsigned char> row(frame.width);
    for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x)
            row[x] = frame.at(x, y) ? 255 : 0;
        out.write(reinterpret_cast<const char*>(row.data()), row.size());
    }
}

BinaryFrame read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P5" || w <= 0 || h <= 0 || maxval != 255)
        throw Error("unsupported PGM: " + path);
    in.get();  // single whitespace after header
    BinaryFrame frame;
    frame.width = w;
    frame.height = h;
    frame.bits.resize(static_cast<std::size_t>(w) * h);
    std::vector<unsigned char> raw(frame.bits.size());
    in.read(reinterpret_cast<char*>(raw.data()), raw.size());
    if (!in) throw Error("truncated PGM: " + path);
    for (std::size_t i = 0; i < raw.size(); ++i) frame.bits[i] = raw[i] ? 1 : 0;
    return frame;
}

void write_frame_series(const FrameSeries& series, const std::string& directory) {
    fs::create_directories(directory);
    std::ofstream idx(fs::path(directory) / "frames.idx");
    if (!idx) throw Error("cannot write frames.idx in " + directory);
    char line[128];
    for (std::size_t i = 0; i < series.frames.size(); ++i) {
        const BinaryFrame& f = series.frames[i];
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%06zu.pgm", i);
        write_pgm(f, (fs::path(directory) / name).string());
        std::snprintf(line, sizeof(line), "%zu %.17g %d %d\n", i, f.timestamp,
                      f.grasp_pixel.x, f.grasp_pixel.y);
        idx << line;
    }
}

FrameSeries read_frame_series(const std::string& directory) {
    std::ifstream idx(fs::path(directory) / "frames.idx");
    if (!idx) throw Error("cannot read frames.idx in " + directory);
    FrameSeries series;
    std::size_t number;
    double timestamp;
    int gx, gy;
    while (idx >> number >> timestamp >> gx >> gy) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%06zu.pgm", number);
        BinaryFrame frame = read_pgm((fs::path(directory) / name).string());
        frame.timestamp = timestamp;
        frame.grasp_pixel = {gx, gy};
        series.frames.push_back(std::move(frame));
    }
    if (series.frames.empty()) throw Error("empty frame series in " + directory);
    if (series.frames.size() > 1)
        series.sampling_period =
            series.frames[1].timestamp - series.frames[0].timestamp;
    return series;
}

}  // namespace castsim
