#pragma once

#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "mrc/geometry.hpp"
#include "mrc/global_planner.hpp"
#include "mrc/world.hpp"

namespace mrc {

struct KinematicLimits {
  double v_max = 2.0;
  double v_min = 0.0;
  double w_max = 1.5;
  double a_lin = 2.0;
  double a_ang = 3.0;
};

struct VelocityCommand {
  double v = 0.0;
  double w = 0.0;

  bool operator==(const VelocityCommand&) const = default;
};

struct VelocityWindow {
  double v_lo = 0.0;
  double v_hi = 0.0;
  double w_lo = 0.0;
  double w_hi = 0.0;

  bool contains(const VelocityCommand& c, double tol = 1e-12) const {
    return c.v >= v_lo - tol && c.v <= v_hi + tol && c.w >= w_lo - tol && c.w <= w_hi + tol;
  }
};

struct LidarConfig {
  int rays = 72;
  double span = 2.0 * std::numbers::pi;
  double max_range = 12.0;
};

/// Ranges in the robot frame. Ray i points at heading + angle_of(i).
struct LidarScan {
  std::vector<double> ranges;
  double span = 2.0 * std::numbers::pi;
  double max_range = 12.0;

  double angle_of(std::size_t i) const;
  /// Hit points in the world frame for a scan taken at `pose`; misses are dropped.
  std::vector<Point2> obstacle_points(const Pose2& pose) const;
};

struct DwaConfig {
  KinematicLimits limits;
  double horizon = 1.5;
  double dt = 0.1;
  int v_samples = 11;
  int w_samples = 21;
  double w_heading = 0.8;
  double w_clear = 0.2;
  double w_vel = 0.1;
  /// Distance along the global path to the tracked target point.
  double lookahead = 3.0;
  /// Required clearance beyond the robot radius against scan points.
  double safety_margin = 0.05;
};

VelocityWindow dynamic_window(const VelocityCommand& current, const KinematicLimits& limits,
                              double dt);

/// Exact constant-velocity unicycle motion over `dt`.
Pose2 integrate(const Pose2& pose, const VelocityCommand& cmd, double dt);

/// Poses at step, 2*step, ..., horizon (the last step is shortened to land on the horizon).
std::vector<Pose2> rollout(const Pose2& pose, const VelocityCommand& cmd, double horizon,
                           double step);

LidarScan simulate_lidar(const WorldMap& map, std::span<const Disc> others, const Pose2& pose,
                         const LidarConfig& cfg);

struct DwaState {
  Pose2 pose;
  VelocityCommand velocity;
  double radius = 1.5;
};

/// Point `lookahead` ahead of the robot's projection onto the path.
Point2 path_target(const PlannedPath& path, const Point2& position, double lookahead);

/// Best admissible command in the dynamic window, or nullopt when every
/// sampled command is infeasible.
///
/// A command is admissible when its rollout keeps at least radius + safety_margin
/// from every scan point. A robot already closer than that may only pick commands
/// that do not reduce its clearance. Ties on score go to larger v, then smaller
/// |w|, then larger w.
std::optional<VelocityCommand> select_command(const DwaState& state, const PlannedPath& path,
                                              const LidarScan& scan, const DwaConfig& cfg);

}  // namespace mrc
