#pragma once

#include <cmath>

namespace castsim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Vec2&) const = default;

    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

inline Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
inline Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
inline Vec2 operator*(double s, Vec2 v) { return v *= s; }
inline Vec2 operator*(Vec2 v, double s) { return v *= s; }
inline Vec2 operator-(const Vec2& v) { return {-v.x, -v.y}; }

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

// z-component of the 3D cross product; positive when b is CCW of a.
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline double norm_sq(const Vec2& v) { return v.x * v.x + v.y * v.y; }

// Rotate 90 degrees counterclockwise.
inline Vec2 perp(const Vec2& v) { return {-v.y, v.x}; }

inline bool finite(const Vec2& v) { return std::isfinite(v.x) && std::isfinite(v.y); }

// Endpoint-exact: lerp(a, b, 1.0) == b bit for bit.
inline Vec2 lerp(const Vec2& a, const Vec2& b, double t) {
    return {a.x * (1.0 - t) + b.x * t, a.y * (1.0 - t) + b.y * t};
}

// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    return a;
}

}  // namespace castsim
