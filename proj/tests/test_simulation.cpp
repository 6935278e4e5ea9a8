#include <doctest.h>

#include <set>
#include <sstream>

#include <json.hpp>

#include "mrc/errors.hpp"
#include "mrc/simulation.hpp"

using namespace mrc;
using nlohmann::json;

namespace {

TrialConfig scripted(Mode mode, std::vector<Mission> missions) {
  TrialConfig cfg;
  cfg.mode = mode;
  cfg.missions = std::move(missions);
  return cfg;
}

const std::vector<Mission> kCrossing{{{5, 25}, {45, 25}}, {{25, 5}, {25, 45}}};

}  // namespace

TEST_CASE("detect_stuck examples") {
  RobotState r;
  r.patience = 3.0;
  r.progress_history = {{0.0, {0, 0}, false}, {2.0, {0.1, 0}, false}, {4.0, {0.3, 0}, false}};
  CHECK(detect_stuck(r, 4.0, 0.5));
  CHECK_FALSE(detect_stuck(r, 4.0, 0.2));

  r.progress_history[1].held = true;
  CHECK_FALSE(detect_stuck(r, 4.0, 0.5));

  r.progress_history = {{2.0, {0, 0}, false}, {4.0, {0.1, 0}, false}};
  CHECK_FALSE(detect_stuck(r, 4.0, 0.5));

  r.progress_history = {{0.0, {0, 0}, false}, {4.0, {1.0, 0}, false}};
  CHECK_FALSE(detect_stuck(r, 4.0, 0.5));

  r.progress_history.clear();
  CHECK_FALSE(detect_stuck(r, 4.0, 0.5));
}

TEST_CASE("a lone robot reaches its goal without replanning") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    TrialConfig cfg;
    cfg.n_robots = 1;
    const auto r = run_trial(cfg, seed);
    REQUIRE(r.error.empty());
    CHECK(r.robots[0].success);
    CHECK(r.robots[0].replans == 0);
    CHECK(r.robot_collisions == 0);
    CHECK(r.obstacle_collisions == 0);
    CHECK(r.commands_issued == 0);
  }
}

TEST_CASE("trials are deterministic down to the trace bytes") {
  for (Mode mode : {Mode::hybrid, Mode::decentralized}) {
    TrialConfig cfg;
    cfg.mode = mode;
    cfg.n_robots = 5;
    std::ostringstream a, b;
    const auto ra = run_trial(cfg, 42, &a);
    const auto rb = run_trial(cfg, 42, &b);
    CHECK(a.str() == b.str());
    CHECK(ra.success_rate() == rb.success_rate());
    CHECK(ra.mean_speed() == rb.mean_speed());
    CHECK(ra.total_replans() == rb.total_replans());
    std::ostringstream c;
    run_trial(cfg, 43, &c);
    CHECK(a.str() != c.str());
  }
}

TEST_CASE("crossing missions: one robot is held, both arrive") {
  Simulation sim(scripted(Mode::hybrid, kCrossing), 1);
  std::set<RobotId> ever_held;
  while (!sim.finished()) {
    for (const auto& e : sim.step())
      if (e.kind == SimEventKind::held) ever_held.insert(e.robot);
  }
  const auto r = sim.result();
  CHECK(ever_held.size() == 1);
  CHECK(r.success_rate() == 1.0);
  CHECK(r.robot_collisions == 0);
  CHECK(r.obstacle_collisions == 0);

  const auto d = run_trial(scripted(Mode::decentralized, kCrossing), 1);
  CHECK(d.commands_issued == 0);
}

TEST_CASE("kinematic properties hold at every step") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    for (Mode mode : {Mode::hybrid, Mode::decentralized}) {
      TrialConfig cfg;
      cfg.mode = mode;
      cfg.n_robots = 6;
      Simulation sim(cfg, seed);
      const double v_max = cfg.sim.dwa.limits.v_max;
      while (!sim.finished()) {
        std::vector<Point2> before;
        std::vector<bool> was_terminal;
        for (const auto& r : sim.robots()) {
          before.push_back(r.pose.position());
          was_terminal.push_back(r.terminal());
        }
        sim.step();
        for (const auto& r : sim.robots()) {
          const auto i = static_cast<std::size_t>(r.id);
          const double moved = distance(before[i], r.pose.position());
          CHECK(moved <= v_max * cfg.sim.dt + 1e-9);
          if (r.status == NavStatus::held) CHECK(moved == 0.0);
          if (was_terminal[i]) CHECK(moved == 0.0);
          if (r.status == NavStatus::reached)
            CHECK(distance(r.pose.position(), r.mission.goal) <= cfg.sim.goal_tolerance + 1e-9);
        }
        if (mode == Mode::decentralized) CHECK(sim.coordinator() == nullptr);
      }
      CHECK(sim.now() <= cfg.sim.timeout + 1e-9);
    }
  }
}

TEST_CASE("robots that run out of time are TIMED_OUT") {
  TrialConfig cfg = scripted(Mode::hybrid, {{{5, 5}, {45, 45}}});
  cfg.sim.timeout = 2.0;
  Simulation sim(cfg, 1);
  while (!sim.finished()) sim.step();
  CHECK(sim.step_index() == 20);
  CHECK(sim.robots()[0].status == NavStatus::timed_out);
  const auto r = sim.result();
  CHECK_FALSE(r.robots[0].success);
  CHECK_FALSE(r.robots[0].time_to_goal.has_value());
  CHECK(r.success_rate() == 0.0);
}

TEST_CASE("replanning routes around another robot and reaches the coordinator") {
  Simulation sim(scripted(Mode::hybrid, {{{5, 15}, {45, 15}}, {{25, 15}, {25, 5}}}), 1);
  std::vector<SimEvent> events;
  REQUIRE(sim.trigger_replan(0, &events) == ReplanOutcome::replanned);
  REQUIRE(events.size() == 1);
  CHECK(events[0].kind == SimEventKind::replanned);
  const auto& robot = sim.robots()[0];
  CHECK(robot.replan_count == 1);
  const auto& w = robot.path.waypoints;
  CHECK(w.front() == Point2{5, 15});
  CHECK(w.back() == Point2{45, 15});
  for (std::size_t k = 0; k + 1 < w.size(); ++k) CHECK(point_segment_distance({25, 15}, w[k], w[k + 1]) > 3.0);

  sim.step();
  const auto* coord = sim.coordinator();
  REQUIRE(coord != nullptr);
  const auto it = std::find_if(coord->tracks().begin(), coord->tracks().end(),
                               [](const RobotTrack& t) { return t.id == 0; });
  REQUIRE(it != coord->tracks().end());
  CHECK(it->path.waypoints.back() == Point2{45, 15});
  const auto& tail = it->path.waypoints;
  for (std::size_t k = 1; k < tail.size(); ++k)
    CHECK(std::find(w.begin(), w.end(), tail[k]) != w.end());
}

TEST_CASE("failed replanning still counts") {
  TrialConfig cfg = scripted(Mode::decentralized, {{{3, 3}, {37, 3}}, {{20, 3}, {35, 3}}});
  cfg.sim.world.width = 40;
  cfg.sim.world.height = 6;
  cfg.sim.world.pillar_rows = 0;
  cfg.sim.world.pillar_cols = 0;
  Simulation sim(cfg, 1);
  const auto old_path = sim.robots()[0].path.waypoints;
  std::vector<SimEvent> events;
  CHECK(sim.trigger_replan(0, &events) == ReplanOutcome::no_path);
  REQUIRE(events.size() == 1);
  CHECK(events[0].kind == SimEventKind::replan_failed);
  CHECK(sim.robots()[0].replan_count == 1);
  CHECK(sim.robots()[0].path.waypoints == old_path);
}

TEST_CASE("invalid configurations are rejected") {
  TrialConfig cfg;
  cfg.n_robots = 0;
  CHECK_THROWS_AS(Simulation(cfg, 1), InvalidConfig);
  cfg.n_robots = 2;
  cfg.sim.dt = 0.0;
  CHECK_THROWS_AS(Simulation(cfg, 1), InvalidConfig);
  cfg.sim.dt = 0.1;
  cfg.sim.patience_min = 7.0;
  CHECK_THROWS_AS(Simulation(cfg, 1), InvalidConfig);
  CHECK(parse_mode("Hybrid") == Mode::hybrid);
  CHECK(parse_mode("decentralized") == Mode::decentralized);
  CHECK_THROWS_AS(parse_mode("central"), InvalidConfig);
}

TEST_CASE("reported metrics match a recomputation from the trace") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    for (Mode mode : {Mode::hybrid, Mode::decentralized}) {
      TrialConfig cfg;
      cfg.mode = mode;
      cfg.n_robots = 6;
      std::ostringstream trace;
      const auto result = run_trial(cfg, seed, &trace);
      REQUIRE(result.error.empty());

      std::istringstream in(trace.str());
      std::string line;
      std::getline(in, line);
      const json header = json::parse(line);
      const std::size_t n = header["robots"].size();
      std::vector<Point2> last(n);
      std::vector<double> dist(n, 0.0);
      std::vector<int> steps(n, 0), replans(n, 0);
      std::vector<bool> done(n, false), reached(n, false);
      for (std::size_t i = 0; i < n; ++i)
        last[i] = {header["robots"][i]["start"][0].get<double>(), header["robots"][i]["start"][1].get<double>()};
      int records = 0;
      while (std::getline(in, line)) {
        ++records;
        const json rec = json::parse(line);
        for (const auto& r : rec["robots"]) {
          const auto i = r["id"].get<std::size_t>();
          if (done[i]) continue;
          const Point2 p{r["x"].get<double>(), r["y"].get<double>()};
          dist[i] += distance(last[i], p);
          last[i] = p;
          ++steps[i];
          replans[i] = r["replans"].get<int>();
          const auto status = r["status"].get<std::string>();
          if (status == "REACHED" || status == "TIMED_OUT") {
            done[i] = true;
            reached[i] = status == "REACHED";
          }
        }
      }
      CHECK(records == static_cast<int>(std::lround(result.sim_time / cfg.sim.dt)));
      for (std::size_t i = 0; i < n; ++i) {
        const auto& rr = result.robots[i];
        CHECK(rr.steps == steps[i]);
        CHECK(rr.success == reached[i]);
        CHECK(rr.replans == replans[i]);
        CHECK(rr.distance == doctest::Approx(dist[i]).epsilon(1e-9));
        CHECK(rr.avg_speed == doctest::Approx(dist[i] / steps[i] * 100.0).epsilon(1e-9));
      }
    }
  }
}
