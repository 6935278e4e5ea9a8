#include "mrc/geometry.hpp"

namespace mrc {

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const Point2 ab = b - a;
  const double len2 = ab.squared_norm();
  if (len2 <= 0.0) return distance(p, a);
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

// Ericson, Real-Time Collision Detection, 5.1.9.
SegmentApproach closest_approach(const Point2& p0, const Point2& p1, const Point2& q0,
                                 const Point2& q1) {
  constexpr double eps = 1e-12;
  const Point2 d1 = p1 - p0;
  const Point2 d2 = q1 - q0;
  const Point2 r = p0 - q0;
  const double a = d1.squared_norm();
  const double e = d2.squared_norm();
  const double f = d2.dot(r);
  double s = 0.0;
  double t = 0.0;

  if (a <= eps && e <= eps) {
    return {distance(p0, q0), 0.0, 0.0};
  }
  if (a <= eps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= eps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > eps ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return {distance(p0 + d1 * s, q0 + d2 * t), s, t};
}

bool clip_segment(const Box& box, const Point2& a, const Point2& b, double& t_enter,
                  double& t_exit) {
  t_enter = 0.0;
  t_exit = 1.0;
  const Point2 d = b - a;
  const double p[4] = {-d.x, d.x, -d.y, d.y};
  const double q[4] = {a.x - box.x0, box.x1 - a.x, a.y - box.y0, box.y1 - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0.0) {
      t_enter = std::max(t_enter, r);
    } else {
      t_exit = std::min(t_exit, r);
    }
    if (t_enter > t_exit) return false;
  }
  return true;
}

}  // namespace mrc
