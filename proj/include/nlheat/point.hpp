#pragma once

#include <cmath>

namespace nlheat {

/// Point or displacement in R^1 or R^2. One-dimensional quantities keep y = 0.
struct Point {
    double x = 0.0;
    double y = 0.0;

    constexpr Point& operator+=(const Point& o) { x += o.x; y += o.y; return *this; }
    constexpr Point& operator-=(const Point& o) { x -= o.x; y -= o.y; return *this; }
    constexpr Point& operator*=(double s) { x *= s; y *= s; return *this; }

    friend constexpr Point operator+(Point a, const Point& b) { return a += b; }
    friend constexpr Point operator-(Point a, const Point& b) { return a -= b; }
    friend constexpr Point operator*(Point a, double s) { return a *= s; }
    friend constexpr Point operator*(double s, Point a) { return a *= s; }
    friend constexpr bool operator==(const Point&, const Point&) = default;
};

constexpr double dot(const Point& a, const Point& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Point& a) { return std::hypot(a.x, a.y); }

} // namespace nlheat
