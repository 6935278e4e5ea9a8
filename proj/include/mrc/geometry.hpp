#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mrc {

using RobotId = int;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Point2&) const = default;

  double dot(const Point2& o) const { return x * o.x + y * o.y; }
  double cross(const Point2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
};

inline double distance(const Point2& a, const Point2& b) { return (a - b).norm(); }

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Pose2() = default;
  Pose2(double px, double py, double h) : x(px), y(py), heading(normalize_angle(h)) {}
  Pose2(const Point2& p, double h) : Pose2(p.x, p.y, h) {}

  Point2 position() const { return {x, y}; }
};

struct Disc {
  Point2 center;
  double radius = 0.0;
};

/// Axis-aligned box [x0, x1] x [y0, y1].
struct Box {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  static Box around(const Point2& p) { return {p.x, p.y, p.x, p.y}; }

  bool operator==(const Box&) const = default;

  Point2 center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }

  bool contains(const Point2& p) const {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }
  bool strictly_contains(const Box& b) const {
    return b.x0 > x0 && b.y0 > y0 && b.x1 < x1 && b.y1 < y1;
  }
  Box inflated(double m) const { return {x0 - m, y0 - m, x1 + m, y1 + m}; }
  Box united(const Box& b) const {
    return {std::min(x0, b.x0), std::min(y0, b.y0), std::max(x1, b.x1), std::max(y1, b.y1)};
  }
  Box expanded(const Point2& p) const { return united(around(p)); }
};

/// Closest approach between segments [p0,p1] and [q0,q1].
struct SegmentApproach {
  double distance = 0.0;
  double s = 0.0;  ///< parameter on the first segment, in [0, 1]
  double t = 0.0;  ///< parameter on the second segment, in [0, 1]
};

SegmentApproach closest_approach(const Point2& p0, const Point2& p1, const Point2& q0,
                                 const Point2& q1);

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b);

/// Liang-Barsky clip of [a,b] against the box; returns false if the segment misses it.
bool clip_segment(const Box& box, const Point2& a, const Point2& b, double& t_enter,
                  double& t_exit);

}  // namespace mrc
