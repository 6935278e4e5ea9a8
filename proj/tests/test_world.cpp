#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "mrc/errors.hpp"
#include "mrc/random.hpp"
#include "mrc/world.hpp"

using namespace mrc;

namespace {

// Smallest positive t with |o + t*d - c| = r, solved from scratch.
double oracle_ray_circle(Point2 o, double angle, Point2 c, double r) {
  const double dx = std::cos(angle), dy = std::sin(angle);
  const double fx = o.x - c.x, fy = o.y - c.y;
  const double b = fx * dx + fy * dy;
  const double cc = fx * fx + fy * fy - r * r;
  const double disc = b * b - cc;
  if (disc < 0) return std::numeric_limits<double>::infinity();
  const double t1 = -b - std::sqrt(disc);
  const double t2 = -b + std::sqrt(disc);
  if (t1 > 0) return t1;
  if (t2 > 0) return t2;
  return std::numeric_limits<double>::infinity();
}

WorldMap empty_world(double size) {
  WorldConfig cfg;
  cfg.width = cfg.height = size;
  cfg.pillar_rows = cfg.pillar_cols = 0;
  return build_world(cfg);
}

}  // namespace

TEST_CASE("default world has a 4x4 pillar grid") {
  const WorldMap map = build_world({});
  REQUIRE(map.pillars().size() == 16);
  for (const auto& p : map.pillars()) {
    CHECK(p.radius == 2.0);
    CHECK(std::fmod(p.center.x, 10.0) == doctest::Approx(0.0));
    CHECK(std::fmod(p.center.y, 10.0) == doctest::Approx(0.0));
    CHECK(p.center.x >= 10.0);
    CHECK(p.center.x <= 40.0);
  }
}

TEST_CASE("pillars never overlap each other") {
  const WorldMap map = build_world({});
  const auto& ps = map.pillars();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      CHECK(distance(ps[i].center, ps[j].center) > ps[i].radius + ps[j].radius);
    }
  }
}

TEST_CASE("empty pillar grid leaves the interior free") {
  const WorldMap map = empty_world(50);
  CHECK(map.pillars().empty());
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Point2 p{rng.uniform(2, 48), rng.uniform(2, 48)};
    CHECK(is_free(map, p, 1.5));
  }
}

TEST_CASE("pillar crossing the boundary is rejected") {
  WorldConfig cfg;
  cfg.width = cfg.height = 10;
  cfg.pillar_rows = cfg.pillar_cols = 1;
  cfg.pillar_radius = 6;
  CHECK_THROWS_AS(build_world(cfg), InvalidConfig);
  CHECK_THROWS_AS(WorldMap(0, 10, {}, 0.5), InvalidConfig);
  CHECK_THROWS_AS(WorldMap(10, 10, {}, 0.0), InvalidConfig);
  CHECK_THROWS_AS(WorldMap(10, 10, {{{5, 5}, 0.0}}, 0.5), InvalidConfig);
}

TEST_CASE("is_free examples") {
  const WorldMap map = build_world({});
  CHECK_FALSE(is_free(map, {20, 20}, 0.0));
  CHECK_FALSE(is_free(map, {20, 20}, 1.5));
  CHECK(is_free(map, {25, 25}, 1.5));
  CHECK_FALSE(is_free(map, {-1, 25}, 1.5));
  CHECK_FALSE(is_free(map, {1, 25}, 1.5));

  // Oracle: minimum distance to any pillar center against the clearance needed.
  double nearest = 1e9;
  for (const auto& p : map.pillars()) nearest = std::min(nearest, distance(p.center, {25, 25}));
  CHECK(nearest == doctest::Approx(std::sqrt(50.0)));
  CHECK(nearest > 2.0 + 1.5);
}

TEST_CASE("is_free agrees with a direct distance check") {
  const WorldMap map = build_world({});
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const Point2 p{rng.uniform(-2, 52), rng.uniform(-2, 52)};
    const double r = rng.uniform(0, 3);
    bool expect = p.x - r >= 0 && p.y - r >= 0 && p.x + r <= 50 && p.y + r <= 50;
    for (const auto& pl : map.pillars()) {
      if (distance(p, pl.center) < pl.radius + r) expect = false;
    }
    CHECK(is_free(map, p, r) == expect);
  }
}

TEST_CASE("is_free is monotone in radius") {
  const WorldMap map = build_world({});
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const Point2 p{rng.uniform(0, 50), rng.uniform(0, 50)};
    const double r1 = rng.uniform(0, 4);
    const double r2 = rng.uniform(0, r1);
    if (is_free(map, p, r1)) CHECK(is_free(map, p, r2));
  }
}

TEST_CASE("extra discs block space") {
  const WorldMap map = empty_world(50);
  const Disc d{{25, 25}, 1.5};
  CHECK_FALSE(is_free(map, {27, 25}, 1.5, {&d, 1}));
  CHECK(is_free(map, {28.1, 25}, 1.5, {&d, 1}));
}

TEST_CASE("raycast examples") {
  const WorldMap open = empty_world(100);
  CHECK(raycast(open, {50, 50}, 0.3, 10.0) == 10.0);

  const WorldMap one(100, 100, {{{60, 50}, 2.0}}, 0.5);
  CHECK(raycast(one, {50, 50}, 0.0, 12.0) == doctest::Approx(8.0).epsilon(1e-12));

  const Disc robot{{55, 50}, 1.5};
  CHECK(raycast(open, {50, 50}, 0.0, 12.0, {&robot, 1}) == doctest::Approx(3.5).epsilon(1e-12));

  // Walls count as obstacles.
  CHECK(raycast(open, {95, 50}, 0.0, 12.0) == doctest::Approx(5.0));
}

TEST_CASE("raycast matches the analytic ray-circle solution") {
  const WorldMap open = empty_world(200);
  Rng rng(17);
  int hits = 0;
  for (int i = 0; i < 2000; ++i) {
    const Point2 o{rng.uniform(90, 110), rng.uniform(90, 110)};
    const Disc d{{rng.uniform(90, 110), rng.uniform(90, 110)}, rng.uniform(0.5, 3)};
    if (distance(o, d.center) <= d.radius) continue;
    const double angle = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const double max_range = 12.0;
    const double got = raycast(open, o, angle, max_range, {&d, 1});
    const double expect = std::min(max_range, oracle_ray_circle(o, angle, d.center, d.radius));
    CHECK(got > 0.0);
    CHECK(got <= max_range);
    CHECK(std::abs(got - expect) <= 1e-9);
    if (expect < max_range) ++hits;
    else CHECK(got == max_range);
  }
  CHECK(hits > 100);
}

TEST_CASE("ray_circle_distance reports misses as negative") {
  CHECK(ray_circle_distance({0, 0}, {1, 0}, {5, 0}, 1) == doctest::Approx(4));
  CHECK(ray_circle_distance({0, 0}, {1, 0}, {-5, 0}, 1) < 0);
  CHECK(ray_circle_distance({0, 0}, {1, 0}, {5, 3}, 1) < 0);
}

TEST_CASE("pose headings are normalized to (-pi, pi]") {
  CHECK(Pose2(0, 0, 3 * std::numbers::pi).heading == doctest::Approx(std::numbers::pi));
  CHECK(Pose2(0, 0, -std::numbers::pi).heading == doctest::Approx(std::numbers::pi));
  CHECK(Pose2(0, 0, 2 * std::numbers::pi + 0.5).heading == doctest::Approx(0.5));
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double h = Pose2(0, 0, rng.uniform(-50, 50)).heading;
    CHECK(h > -std::numbers::pi);
    CHECK(h <= std::numbers::pi);
  }
}
