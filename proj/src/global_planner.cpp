#include "mrc/global_planner.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "mrc/errors.hpp"

namespace mrc {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Octile cost kept as integer move counts so equal-cost routes compare equal
// regardless of the order their steps were summed in.
struct MoveCount {
  int straight = 0;
  int diagonal = 0;

  double value() const { return straight + diagonal * kSqrt2; }
};

double octile(int dc, int dr) {
  dc = std::abs(dc);
  dr = std::abs(dr);
  return std::max(dc, dr) + (kSqrt2 - 1.0) * std::min(dc, dr);
}

// Nearest free cell reachable in a straight line from `p`, used when the
// point itself falls in the inflation band of an obstacle.
std::optional<int> anchor_cell(const OccupancyGrid& grid, const WorldMap& map, const Point2& p,
                               double radius, std::span<const Disc> extra) {
  const int home = grid.cell_of(p);
  if (!grid.blocked(home)) return home;
  const int reach = static_cast<int>(std::ceil(2.0 / grid.resolution()));
  const int hc = grid.col_of(home);
  const int hr = grid.row_of(home);
  std::optional<int> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (int r = hr - reach; r <= hr + reach; ++r) {
    for (int c = hc - reach; c <= hc + reach; ++c) {
      if (!grid.in_bounds(c, r)) continue;
      const int cell = grid.index(c, r);
      if (grid.blocked(cell)) continue;
      const Point2 center = grid.center_of(cell);
      const double d = distance(p, center);
      if (d < best_d && line_of_sight(map, p, center, radius, extra)) {
        best_d = d;
        best = cell;
      }
    }
  }
  return best;
}

}  // namespace

double PlannedPath::length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    total += distance(waypoints[i - 1], waypoints[i]);
  }
  return total;
}

PathProjection project_onto_path(std::span<const Point2> waypoints, const Point2& p) {
  PathProjection best;
  if (waypoints.empty()) return best;
  best.point = waypoints.front();
  best.distance = distance(p, waypoints.front());
  double arc = 0.0;
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const Point2& a = waypoints[i];
    const Point2& b = waypoints[i + 1];
    const Point2 ab = b - a;
    const double len2 = ab.squared_norm();
    const double len = std::sqrt(len2);
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const Point2 q = a + ab * t;
    const double d = distance(p, q);
    if (d < best.distance) {
      best = {i, t, q, arc + t * len, d};
    }
    arc += len;
  }
  return best;
}

Point2 point_at_arc(std::span<const Point2> waypoints, double arc) {
  if (waypoints.empty()) return {};
  if (arc <= 0.0) return waypoints.front();
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const double len = distance(waypoints[i], waypoints[i + 1]);
    if (arc <= len && len > 0.0) {
      return waypoints[i] + (waypoints[i + 1] - waypoints[i]) * (arc / len);
    }
    arc -= len;
  }
  return waypoints.back();
}

std::vector<Point2> remaining_path(std::span<const Point2> waypoints, const Point2& p) {
  std::vector<Point2> out;
  if (waypoints.empty()) return out;
  const PathProjection proj = project_onto_path(waypoints, p);
  out.push_back(proj.point);
  for (std::size_t i = proj.segment + 1; i < waypoints.size(); ++i) {
    if (waypoints[i] == out.back()) continue;
    out.push_back(waypoints[i]);
  }
  return out;
}

OccupancyGrid::OccupancyGrid(const WorldMap& map, double inflation, std::span<const Disc> extra)
    : cols_(static_cast<int>(std::ceil(map.width() / map.grid_resolution()))),
      rows_(static_cast<int>(std::ceil(map.height() / map.grid_resolution()))),
      resolution_(map.grid_resolution()),
      blocked_(static_cast<std::size_t>(cols_) * rows_, 0) {
  for (int cell = 0; cell < size(); ++cell) {
    blocked_[static_cast<std::size_t>(cell)] = is_free(map, center_of(cell), inflation, extra) ? 0 : 1;
  }
}

int OccupancyGrid::cell_of(const Point2& p) const {
  const int c = std::clamp(static_cast<int>(std::floor(p.x / resolution_)), 0, cols_ - 1);
  const int r = std::clamp(static_cast<int>(std::floor(p.y / resolution_)), 0, rows_ - 1);
  return index(c, r);
}

Point2 OccupancyGrid::center_of(int cell) const {
  return {(col_of(cell) + 0.5) * resolution_, (row_of(cell) + 0.5) * resolution_};
}

std::optional<GridPath> grid_search(const OccupancyGrid& grid, int start_cell, int goal_cell) {
  if (grid.blocked(start_cell) || grid.blocked(goal_cell)) return std::nullopt;

  const auto n = static_cast<std::size_t>(grid.size());
  std::vector<MoveCount> g(n);
  std::vector<unsigned char> seen(n, 0);
  std::vector<unsigned char> closed(n, 0);
  std::vector<int> parent(n, -1);

  const int gc = grid.col_of(goal_cell);
  const int gr = grid.row_of(goal_cell);
  auto heuristic = [&](int cell) {
    return octile(grid.col_of(cell) - gc, grid.row_of(cell) - gr);
  };

  using Entry = std::tuple<double, double, int>;  // f, h, cell
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  seen[static_cast<std::size_t>(start_cell)] = 1;
  open.emplace(heuristic(start_cell), heuristic(start_cell), start_cell);

  while (!open.empty()) {
    const auto [f, h, cell] = open.top();
    open.pop();
    const auto ci = static_cast<std::size_t>(cell);
    if (closed[ci]) continue;
    closed[ci] = 1;
    if (cell == goal_cell) break;

    const int c = grid.col_of(cell);
    const int r = grid.row_of(cell);
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dc == 0 && dr == 0) continue;
        const int nc = c + dc;
        const int nr = r + dr;
        if (!grid.in_bounds(nc, nr)) continue;
        const int next = grid.index(nc, nr);
        if (grid.blocked(next)) continue;
        const bool diagonal = dc != 0 && dr != 0;
        if (diagonal && (grid.blocked(grid.index(c + dc, r)) || grid.blocked(grid.index(c, r + dr)))) {
          continue;
        }
        MoveCount cand = g[ci];
        (diagonal ? cand.diagonal : cand.straight) += 1;
        const auto ni = static_cast<std::size_t>(next);
        if (closed[ni]) continue;
        if (!seen[ni] || cand.value() < g[ni].value()) {
          seen[ni] = 1;
          g[ni] = cand;
          parent[ni] = cell;
          const double hn = heuristic(next);
          open.emplace(cand.value() + hn, hn, next);
        }
      }
    }
  }

  if (!closed[static_cast<std::size_t>(goal_cell)]) return std::nullopt;
  GridPath out;
  for (int cell = goal_cell; cell != -1; cell = parent[static_cast<std::size_t>(cell)]) {
    out.cells.push_back(cell);
  }
  std::reverse(out.cells.begin(), out.cells.end());
  out.cost = g[static_cast<std::size_t>(goal_cell)].value() * grid.resolution();
  return out;
}

bool line_of_sight(const WorldMap& map, const Point2& a, const Point2& b, double radius,
                   std::span<const Disc> extra) {
  const Box inner{radius, radius, map.width() - radius, map.height() - radius};
  if (!inner.contains(a) || !inner.contains(b)) return false;
  for (const auto& p : map.pillars()) {
    if (point_segment_distance(p.center, a, b) < p.radius + radius) return false;
  }
  for (const auto& d : extra) {
    if (point_segment_distance(d.center, a, b) < d.radius + radius) return false;
  }
  return true;
}

std::vector<Point2> shortcut(const WorldMap& map, std::span<const Point2> points, double radius,
                             std::span<const Disc> extra) {
  std::vector<Point2> out;
  if (points.empty()) return out;
  out.push_back(points.front());
  std::size_t i = 0;
  while (i + 1 < points.size()) {
    std::size_t j = points.size() - 1;
    while (j > i + 1 && !line_of_sight(map, points[i], points[j], radius, extra)) --j;
    out.push_back(points[j]);
    i = j;
  }
  return out;
}

PlanDetail plan_path_detailed(const WorldMap& map, const Point2& start, const Point2& goal,
                              double robot_radius, std::span<const Disc> extra_obstacles,
                              const PlannerOptions& options) {
  if (!is_free(map, start, robot_radius, extra_obstacles)) throw InvalidStart();
  if (!is_free(map, goal, robot_radius, extra_obstacles)) throw NoPath("goal is blocked");

  PlanDetail detail;
  detail.path.waypoints.push_back(start);
  if (start == goal) {
    detail.path.etas = {0.0};
    return detail;
  }

  const double inflation = robot_radius + options.clearance_margin;
  const OccupancyGrid grid(map, inflation, extra_obstacles);
  const auto start_cell = anchor_cell(grid, map, start, robot_radius, extra_obstacles);
  const auto goal_cell = anchor_cell(grid, map, goal, robot_radius, extra_obstacles);
  if (!start_cell || !goal_cell) throw NoPath("no free grid cell near start or goal");

  auto grid_path = grid_search(grid, *start_cell, *goal_cell);
  if (!grid_path) throw NoPath();

  std::vector<Point2> raw;
  raw.reserve(grid_path->cells.size() + 2);
  raw.push_back(start);
  for (int cell : grid_path->cells) {
    const Point2 c = grid.center_of(cell);
    if (c != raw.back()) raw.push_back(c);
  }
  if (goal != raw.back()) raw.push_back(goal);

  detail.path.waypoints = shortcut(map, raw, inflation, extra_obstacles);
  detail.grid_path = std::move(*grid_path);
  detail.path = annotate_etas(std::move(detail.path), 1.0, 0.0);
  return detail;
}

PlannedPath plan_path(const WorldMap& map, const Point2& start, const Point2& goal,
                      double robot_radius, std::span<const Disc> extra_obstacles,
                      const PlannerOptions& options) {
  return plan_path_detailed(map, start, goal, robot_radius, extra_obstacles, options).path;
}

PlannedPath annotate_etas(PlannedPath path, double nominal_speed, double now) {
  if (!(nominal_speed > 0.0)) throw std::invalid_argument("nominal speed must be positive");
  path.etas.resize(path.waypoints.size());
  double arc = 0.0;
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    if (i > 0) arc += distance(path.waypoints[i - 1], path.waypoints[i]);
    path.etas[i] = now + arc / nominal_speed;
  }
  path.announced_at = now;
  return path;
}

Mission sample_mission(const WorldMap& map, double robot_radius, Rng& rng,
                       const MissionOptions& options) {
  const double min_sep = options.min_separation_fraction * map.width();
  const double clearance = robot_radius + options.clearance_margin;
  auto draw = [&] {
    return Point2{rng.uniform(clearance, map.width() - clearance),
                  rng.uniform(clearance, map.height() - clearance)};
  };
  for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
    const Point2 start = draw();
    const Point2 goal = draw();
    if (distance(start, goal) < min_sep) continue;
    if (!is_free(map, start, clearance) || !is_free(map, goal, clearance)) continue;
    return {start, goal};
  }
  throw SamplingExhausted("no valid mission after " + std::to_string(options.max_attempts) +
                          " attempts");
}

}  // namespace mrc
