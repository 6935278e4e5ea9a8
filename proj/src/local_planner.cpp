#include "mrc/local_planner.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mrc {

namespace {

std::vector<double> samples(double lo, double hi, int count) {
  if (count <= 1 || hi - lo <= 0.0) return {0.5 * (lo + hi)};
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return out;
}

struct RankedPoint {
  double range;
  Point2 p;
};

// Minimum distance from any rollout pose to the obstacle points, which are
// sorted by range from the rollout origin. `travel` bounds how far the rollout
// gets from that origin, which lets the scan stop early.
double rollout_clearance(std::span<const Pose2> poses, std::span<const RankedPoint> points,
                         double travel, double cap) {
  double best2 = cap * cap;
  for (const auto& rp : points) {
    const double lower = rp.range - travel;
    if (lower > 0.0 && lower * lower >= best2) break;
    for (const auto& pose : poses) {
      const double d2 = (pose.position() - rp.p).squared_norm();
      if (d2 < best2) best2 = d2;
    }
  }
  return std::sqrt(best2);
}

}  // namespace

double LidarScan::angle_of(std::size_t i) const {
  const auto n = ranges.size();
  if (n <= 1) return 0.0;
  if (span >= 2.0 * std::numbers::pi - 1e-9) {
    return -std::numbers::pi + span * static_cast<double>(i) / static_cast<double>(n);
  }
  return -0.5 * span + span * static_cast<double>(i) / static_cast<double>(n - 1);
}

std::vector<Point2> LidarScan::obstacle_points(const Pose2& pose) const {
  std::vector<Point2> out;
  out.reserve(ranges.size());
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (ranges[i] >= max_range) continue;
    const double a = pose.heading + angle_of(i);
    out.push_back({pose.x + ranges[i] * std::cos(a), pose.y + ranges[i] * std::sin(a)});
  }
  return out;
}

VelocityWindow dynamic_window(const VelocityCommand& current, const KinematicLimits& limits,
                              double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  return {std::max(limits.v_min, current.v - limits.a_lin * dt),
          std::min(limits.v_max, current.v + limits.a_lin * dt),
          std::max(-limits.w_max, current.w - limits.a_ang * dt),
          std::min(limits.w_max, current.w + limits.a_ang * dt)};
}

Pose2 integrate(const Pose2& pose, const VelocityCommand& cmd, double dt) {
  const double th = pose.heading;
  if (std::abs(cmd.w) < 1e-9) {
    return {pose.x + cmd.v * dt * std::cos(th), pose.y + cmd.v * dt * std::sin(th), th};
  }
  const double r = cmd.v / cmd.w;
  const double th2 = th + cmd.w * dt;
  return {pose.x + r * (std::sin(th2) - std::sin(th)), pose.y - r * (std::cos(th2) - std::cos(th)),
          th2};
}

std::vector<Pose2> rollout(const Pose2& pose, const VelocityCommand& cmd, double horizon,
                           double step) {
  if (!(step > 0.0) || horizon < step) throw std::invalid_argument("need horizon >= step > 0");
  const auto count = static_cast<std::size_t>(std::ceil(horizon / step - 1e-9));
  std::vector<Pose2> out;
  out.reserve(count);
  Pose2 p = pose;
  double elapsed = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double h = (k + 1 == count) ? horizon - elapsed : step;
    p = integrate(p, cmd, h);
    elapsed += h;
    out.push_back(p);
  }
  return out;
}

LidarScan simulate_lidar(const WorldMap& map, std::span<const Disc> others, const Pose2& pose,
                         const LidarConfig& cfg) {
  if (cfg.rays < 1) throw std::invalid_argument("lidar needs at least one ray");
  LidarScan scan;
  scan.span = cfg.span;
  scan.max_range = cfg.max_range;
  scan.ranges.resize(static_cast<std::size_t>(cfg.rays));
  for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
    scan.ranges[i] =
        raycast(map, pose.position(), pose.heading + scan.angle_of(i), cfg.max_range, others);
  }
  return scan;
}

Point2 path_target(const PlannedPath& path, const Point2& position, double lookahead) {
  const auto proj = project_onto_path(path.waypoints, position);
  return point_at_arc(path.waypoints, proj.arc + lookahead);
}

std::optional<VelocityCommand> select_command(const DwaState& state, const PlannedPath& path,
                                              const LidarScan& scan, const DwaConfig& cfg) {
  if (path.waypoints.empty()) throw std::invalid_argument("path must not be empty");
  const auto& lim = cfg.limits;
  const VelocityWindow win = dynamic_window(state.velocity, lim, cfg.dt);
  const Point2 target = path_target(path, state.pose.position(), cfg.lookahead);
  const double threshold = state.radius + cfg.safety_margin;

  std::vector<RankedPoint> points;
  for (const auto& p : scan.obstacle_points(state.pose)) {
    points.push_back({distance(p, state.pose.position()), p});
  }
  std::sort(points.begin(), points.end(),
            [](const RankedPoint& a, const RankedPoint& b) { return a.range < b.range; });
  const double current_clearance = points.empty() ? scan.max_range : points.front().range;
  const bool inside = current_clearance < threshold;

  std::optional<VelocityCommand> best;
  double best_score = -std::numeric_limits<double>::infinity();
  auto better = [&](double score, const VelocityCommand& c) {
    if (!best) return true;
    if (score != best_score) return score > best_score;
    if (c.v != best->v) return c.v > best->v;
    if (std::abs(c.w) != std::abs(best->w)) return std::abs(c.w) < std::abs(best->w);
    return c.w > best->w;
  };

  for (double v : samples(win.v_lo, win.v_hi, cfg.v_samples)) {
    for (double w : samples(win.w_lo, win.w_hi, cfg.w_samples)) {
      const VelocityCommand cmd{v, w};
      const auto poses = rollout(state.pose, cmd, cfg.horizon, cfg.dt);
      const double clearance =
          rollout_clearance(poses, points, std::abs(v) * cfg.horizon, scan.max_range);
      if (inside ? clearance < current_clearance : clearance < threshold) continue;

      const Pose2& end = poses.back();
      const Point2 to_target = target - end.position();
      double heading_term = 1.0;
      if (to_target.squared_norm() > 1e-12) {
        const double err =
            std::abs(normalize_angle(std::atan2(to_target.y, to_target.x) - end.heading));
        heading_term = 1.0 - err / std::numbers::pi;
      }
      const double clearance_term = std::min(clearance, scan.max_range) / scan.max_range;
      const double velocity_term = lim.v_max > 0.0 ? v / lim.v_max : 0.0;
      const double score = cfg.w_heading * heading_term + cfg.w_clear * clearance_term +
                           cfg.w_vel * velocity_term;
      if (better(score, cmd)) {
        best = cmd;
        best_score = score;
      }
    }
  }
  return best;
}

}  // namespace mrc
