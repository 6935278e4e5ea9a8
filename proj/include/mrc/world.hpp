#pragma once

#include <span>
#include <vector>

#include "mrc/geometry.hpp"

namespace mrc {

struct Pillar {
  Point2 center;
  double radius = 0.0;
};

struct WorldConfig {
  double width = 50.0;
  double height = 50.0;
  int pillar_rows = 4;
  int pillar_cols = 4;
  double pillar_radius = 2.0;
  double grid_resolution = 0.5;
};

/// Bounded arena with circular pillars. Immutable once built.
class WorldMap {
 public:
  /// Throws InvalidConfig when the invariants do not hold.
  WorldMap(double width, double height, std::vector<Pillar> pillars, double grid_resolution);

  double width() const { return width_; }
  double height() const { return height_; }
  double grid_resolution() const { return grid_resolution_; }
  const std::vector<Pillar>& pillars() const { return pillars_; }
  Box bounds() const { return {0.0, 0.0, width_, height_}; }

 private:
  double width_;
  double height_;
  std::vector<Pillar> pillars_;
  double grid_resolution_;
};

/// Pillars go on an evenly spaced grid: with c columns, centers sit at
/// x = width * (i + 1) / (c + 1). The default config yields {10, 20, 30, 40}^2.
WorldMap build_world(const WorldConfig& config);

/// True iff a disc of `robot_radius` at `p` is inside the arena and touches no pillar.
bool is_free(const WorldMap& map, const Point2& p, double robot_radius);

/// Same test plus a set of extra circular obstacles.
bool is_free(const WorldMap& map, const Point2& p, double robot_radius,
             std::span<const Disc> extra);

/// Distance along the ray to the first pillar, wall or disc, clamped to `max_range`.
/// A ray starting inside geometry reports a tiny positive distance.
double raycast(const WorldMap& map, const Point2& origin, double angle, double max_range,
               std::span<const Disc> dynamic_discs = {});

/// Ray/circle hit distance, or a negative value on a miss. Exposed for tests.
double ray_circle_distance(const Point2& origin, const Point2& dir, const Point2& center,
                           double radius);

}  // namespace mrc
