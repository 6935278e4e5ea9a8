#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mrc/geometry.hpp"
#include "mrc/random.hpp"
#include "mrc/world.hpp"

namespace mrc {

/// Trajectory a robot announces: waypoints plus estimated arrival times.
struct PlannedPath {
  RobotId robot_id = 0;
  std::vector<Point2> waypoints;
  std::vector<double> etas;
  double announced_at = 0.0;

  double length() const;
  std::size_t segment_count() const { return waypoints.empty() ? 0 : waypoints.size() - 1; }
};

/// Where a point projects onto a polyline.
struct PathProjection {
  std::size_t segment = 0;  ///< index of the segment start waypoint
  double t = 0.0;           ///< parameter on that segment
  Point2 point;
  double arc = 0.0;         ///< arc length from the first waypoint
  double distance = 0.0;    ///< distance from the query point
};

PathProjection project_onto_path(std::span<const Point2> waypoints, const Point2& p);

/// Point at the given arc length, clamped to the path ends.
Point2 point_at_arc(std::span<const Point2> waypoints, double arc);

/// The part of the path from the projection of `p` onward, starting at the projected point.
std::vector<Point2> remaining_path(std::span<const Point2> waypoints, const Point2& p);

struct Mission {
  Point2 start;
  Point2 goal;
};

/// Inflated occupancy grid over the arena. A cell is blocked when its
/// center is not free at the inflation radius.
class OccupancyGrid {
 public:
  OccupancyGrid(const WorldMap& map, double inflation, std::span<const Disc> extra = {});

  int cols() const { return cols_; }
  int rows() const { return rows_; }
  int size() const { return cols_ * rows_; }
  double resolution() const { return resolution_; }
  bool blocked(int cell) const { return blocked_[static_cast<std::size_t>(cell)] != 0; }
  bool in_bounds(int col, int row) const {
    return col >= 0 && row >= 0 && col < cols_ && row < rows_;
  }
  int index(int col, int row) const { return row * cols_ + col; }
  int col_of(int cell) const { return cell % cols_; }
  int row_of(int cell) const { return cell / cols_; }
  int cell_of(const Point2& p) const;
  Point2 center_of(int cell) const;

 private:
  int cols_;
  int rows_;
  double resolution_;
  std::vector<unsigned char> blocked_;
};

struct GridPath {
  std::vector<int> cells;
  double cost = 0.0;  ///< octile length in world units
};

/// 8-connected A* with octile costs and heuristic. A diagonal move requires
/// both orthogonal neighbours to be free (no corner cutting).
std::optional<GridPath> grid_search(const OccupancyGrid& grid, int start_cell, int goal_cell);

struct PlannerOptions {
  /// Extra clearance on top of the robot radius for grid inflation and shortcutting.
  double clearance_margin = 0.25;
};

/// True iff a disc of `radius` swept along [a,b] stays inside the arena and off every obstacle.
bool line_of_sight(const WorldMap& map, const Point2& a, const Point2& b, double radius,
                   std::span<const Disc> extra = {});

/// Greedy string pulling: from each anchor, jump to the farthest visible point.
std::vector<Point2> shortcut(const WorldMap& map, std::span<const Point2> points, double radius,
                             std::span<const Disc> extra = {});

struct PlanDetail {
  PlannedPath path;
  GridPath grid_path;  ///< pre-shortcut cell sequence
};

/// A* from start to goal, then shortcutting. Throws InvalidStart or NoPath.
/// `extra_obstacles` are other robots; each is inflated by `robot_radius`.
PlanDetail plan_path_detailed(const WorldMap& map, const Point2& start, const Point2& goal,
                              double robot_radius, std::span<const Disc> extra_obstacles = {},
                              const PlannerOptions& options = {});

PlannedPath plan_path(const WorldMap& map, const Point2& start, const Point2& goal,
                      double robot_radius, std::span<const Disc> extra_obstacles = {},
                      const PlannerOptions& options = {});

/// etas[i] = now + arc_length(i) / nominal_speed.
PlannedPath annotate_etas(PlannedPath path, double nominal_speed, double now);

struct MissionOptions {
  double min_separation_fraction = 0.75;  ///< of the map width
  double clearance_margin = 0.25;
  int max_attempts = 10000;
};

/// Rejection-samples a start/goal pair. Throws SamplingExhausted.
Mission sample_mission(const WorldMap& map, double robot_radius, Rng& rng,
                       const MissionOptions& options = {});

}  // namespace mrc
