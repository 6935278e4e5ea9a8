#include "mrc/world.hpp"

#include <limits>
#include <string>

#include "mrc/errors.hpp"

namespace mrc {

namespace {

constexpr double kInsideHit = 1e-9;

}  // namespace

WorldMap::WorldMap(double width, double height, std::vector<Pillar> pillars,
                   double grid_resolution)
    : width_(width), height_(height), pillars_(std::move(pillars)),
      grid_resolution_(grid_resolution) {
  if (!(width_ > 0.0) || !(height_ > 0.0)) {
    throw InvalidConfig("world dimensions must be positive");
  }
  if (!(grid_resolution_ > 0.0)) {
    throw InvalidConfig("grid resolution must be positive");
  }
  for (const auto& p : pillars_) {
    if (!(p.radius > 0.0)) throw InvalidConfig("pillar radius must be positive");
    if (p.center.x - p.radius < 0.0 || p.center.x + p.radius > width_ ||
        p.center.y - p.radius < 0.0 || p.center.y + p.radius > height_) {
      throw InvalidConfig("pillar at (" + std::to_string(p.center.x) + ", " +
                          std::to_string(p.center.y) + ") overlaps the arena boundary");
    }
  }
}

WorldMap build_world(const WorldConfig& config) {
  if (config.pillar_rows < 0 || config.pillar_cols < 0) {
    throw InvalidConfig("pillar grid counts must be non-negative");
  }
  if (!(config.width > 0.0) || !(config.height > 0.0)) {
    throw InvalidConfig("world dimensions must be positive");
  }
  std::vector<Pillar> pillars;
  pillars.reserve(static_cast<std::size_t>(config.pillar_rows) * config.pillar_cols);
  for (int r = 0; r < config.pillar_rows; ++r) {
    for (int c = 0; c < config.pillar_cols; ++c) {
      const double x = config.width * (c + 1) / (config.pillar_cols + 1);
      const double y = config.height * (r + 1) / (config.pillar_rows + 1);
      pillars.push_back({{x, y}, config.pillar_radius});
    }
  }
  return WorldMap(config.width, config.height, std::move(pillars), config.grid_resolution);
}

bool is_free(const WorldMap& map, const Point2& p, double robot_radius) {
  return is_free(map, p, robot_radius, {});
}

bool is_free(const WorldMap& map, const Point2& p, double robot_radius,
             std::span<const Disc> extra) {
  if (p.x - robot_radius < 0.0 || p.x + robot_radius > map.width() ||
      p.y - robot_radius < 0.0 || p.y + robot_radius > map.height()) {
    return false;
  }
  for (const auto& pillar : map.pillars()) {
    const double reach = pillar.radius + robot_radius;
    if ((p - pillar.center).squared_norm() < reach * reach) return false;
  }
  for (const auto& d : extra) {
    const double reach = d.radius + robot_radius;
    if ((p - d.center).squared_norm() < reach * reach) return false;
  }
  return true;
}

double ray_circle_distance(const Point2& origin, const Point2& dir, const Point2& center,
                           double radius) {
  const Point2 oc = origin - center;
  const double c = oc.squared_norm() - radius * radius;
  if (c <= 0.0) return kInsideHit;
  const double b = oc.dot(dir);
  if (b >= 0.0) return -1.0;  // pointing away
  const double disc = b * b - c;
  if (disc < 0.0) return -1.0;
  // Numerically stable smaller root.
  const double q = -b + std::sqrt(disc);
  return c / q;
}

double raycast(const WorldMap& map, const Point2& origin, double angle, double max_range,
               std::span<const Disc> dynamic_discs) {
  const Point2 dir{std::cos(angle), std::sin(angle)};
  if (!map.bounds().contains(origin)) return kInsideHit;

  double best = max_range;
  // Walls: exit distance from the arena.
  if (dir.x > 0.0) best = std::min(best, (map.width() - origin.x) / dir.x);
  if (dir.x < 0.0) best = std::min(best, -origin.x / dir.x);
  if (dir.y > 0.0) best = std::min(best, (map.height() - origin.y) / dir.y);
  if (dir.y < 0.0) best = std::min(best, -origin.y / dir.y);

  auto consider = [&](const Point2& c, double r) {
    const double t = ray_circle_distance(origin, dir, c, r);
    if (t >= 0.0 && t < best) best = t;
  };
  for (const auto& p : map.pillars()) consider(p.center, p.radius);
  for (const auto& d : dynamic_discs) consider(d.center, d.radius);
  return std::max(best, kInsideHit);
}

}  // namespace mrc
