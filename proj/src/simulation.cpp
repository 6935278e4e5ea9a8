#include "mrc/simulation.hpp"

#include <chrono>
#include <cctype>
#include <map>
#include <ostream>

#include <json.hpp>

#include "mrc/errors.hpp"
#include "mrc/random.hpp"

namespace mrc {

namespace {

using ordered = nlohmann::ordered_json;

constexpr int kPlacementAttempts = 1000;

ordered box_json(const Box& b) { return ordered::array({b.x0, b.y0, b.x1, b.y1}); }

ordered path_json(const PlannedPath& p) {
  ordered wps = ordered::array();
  for (const auto& w : p.waypoints) wps.push_back({w.x, w.y});
  return {{"robot", p.robot_id}, {"waypoints", std::move(wps)}};
}

}  // namespace

std::string_view to_string(Mode m) { return m == Mode::hybrid ? "hybrid" : "decentralized"; }

Mode parse_mode(std::string_view text) {
  std::string lower(text);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "hybrid") return Mode::hybrid;
  if (lower == "decentralized") return Mode::decentralized;
  throw InvalidConfig("unknown mode '" + std::string(text) + "'");
}

std::string_view to_string(NavStatus s) {
  switch (s) {
    case NavStatus::navigating: return "NAVIGATING";
    case NavStatus::held: return "HELD";
    case NavStatus::replanning: return "REPLANNING";
    case NavStatus::reached: return "REACHED";
    case NavStatus::timed_out: return "TIMED_OUT";
  }
  return "?";
}

std::string_view to_string(SimEventKind k) {
  switch (k) {
    case SimEventKind::reached: return "reached";
    case SimEventKind::timed_out: return "timed_out";
    case SimEventKind::held: return "held";
    case SimEventKind::released: return "released";
    case SimEventKind::infeasible: return "infeasible";
    case SimEventKind::stuck: return "stuck";
    case SimEventKind::replanned: return "replanned";
    case SimEventKind::replan_failed: return "replan_failed";
    case SimEventKind::robot_collision: return "robot_collision";
    case SimEventKind::obstacle_collision: return "obstacle_collision";
  }
  return "?";
}

void SimConfig::validate() const {
  if (!(robot_radius > 0.0)) throw InvalidConfig("robot radius must be positive");
  if (!(dt > 0.0)) throw InvalidConfig("dt must be positive");
  if (!(timeout > 0.0)) throw InvalidConfig("timeout must be positive");
  if (!(goal_tolerance > 0.0)) throw InvalidConfig("goal tolerance must be positive");
  if (stuck_threshold < 0.0) throw InvalidConfig("stuck threshold must be non-negative");
  if (!(patience_min > 0.0) || patience_max < patience_min) {
    throw InvalidConfig("patience range must satisfy 0 < min <= max");
  }
  if (!(eta_speed_fraction > 0.0)) throw InvalidConfig("ETA speed fraction must be positive");
  const auto& l = dwa.limits;
  if (l.v_max < 0.0 || l.v_min < 0.0 || l.w_max < 0.0 || l.a_lin < 0.0 || l.a_ang < 0.0 ||
      l.v_max < l.v_min) {
    throw InvalidConfig("kinematic limits must be non-negative with v_max >= v_min");
  }
  if (!(dwa.horizon >= dwa.dt) || !(dwa.dt > 0.0)) throw InvalidConfig("need DWA horizon >= dt > 0");
  if (dwa.v_samples < 1 || dwa.w_samples < 1) throw InvalidConfig("DWA sample counts must be >= 1");
  if (lidar.rays < 1 || !(lidar.max_range > 0.0)) throw InvalidConfig("invalid lidar config");
}

double TrialResult::success_rate() const {
  if (robots.empty()) return 0.0;
  int ok = 0;
  for (const auto& r : robots) ok += r.success ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(robots.size());
}

double TrialResult::mean_speed() const {
  if (robots.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : robots) sum += r.avg_speed;
  return sum / static_cast<double>(robots.size());
}

int TrialResult::total_replans() const {
  int sum = 0;
  for (const auto& r : robots) sum += r.replans;
  return sum;
}

bool detect_stuck(const RobotState& robot, double now, double threshold) {
  const auto& h = robot.progress_history;
  if (h.empty()) return false;
  const double window_start = now - robot.patience;
  if (h.front().t > window_start + 1e-9) return false;
  std::size_t ref = 0;
  while (ref + 1 < h.size() && h[ref + 1].t <= window_start + 1e-9) ++ref;
  for (std::size_t i = ref; i < h.size(); ++i) {
    if (h[i].held) return false;
  }
  return distance(h.back().position, h[ref].position) < threshold;
}

Simulation::Simulation(TrialConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)), seed_(seed), world_(build_world(cfg_.sim.world)) {
  cfg_.sim.validate();
  if (!cfg_.missions.empty()) cfg_.n_robots = static_cast<int>(cfg_.missions.size());
  if (cfg_.n_robots < 1) throw InvalidConfig("need at least one robot");
  cfg_.sim.coordinator.nominal_speed = cfg_.sim.eta_speed_fraction * cfg_.sim.dwa.limits.v_max;
  cfg_.sim.coordinator.robot_diameter = 2.0 * cfg_.sim.robot_radius;
  if (cfg_.mode == Mode::hybrid) coordinator_ = std::make_unique<Coordinator>(cfg_.sim.coordinator);
  place_robots(seed);
  const auto n = robots_.size();
  robot_contact_.assign(n, std::vector<bool>(n, false));
  obstacle_contact_.assign(n, false);
}

Simulation::~Simulation() = default;

PlannedPath Simulation::announce(PlannedPath path, RobotId id) const {
  path.robot_id = id;
  return annotate_etas(std::move(path), cfg_.sim.dwa.limits.v_max * cfg_.sim.eta_speed_fraction,
                       now());
}

void Simulation::place_robots(std::uint64_t seed) {
  Rng rng(seed);
  const auto& sim = cfg_.sim;
  const double r = sim.robot_radius;
  const double separation = 2.0 * r + 1.0;
  const bool scripted = !cfg_.missions.empty();

  for (int i = 0; i < cfg_.n_robots; ++i) {
    RobotState robot;
    robot.id = i;
    robot.radius = r;
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
      const Mission m = scripted ? cfg_.missions[static_cast<std::size_t>(i)]
                                 : sample_mission(world_, r, rng, sim.missions);
      const bool crowded = std::any_of(robots_.begin(), robots_.end(), [&](const RobotState& o) {
        return distance(o.mission.start, m.start) < separation ||
               distance(o.mission.goal, m.goal) < separation;
      });
      if (crowded && !scripted) continue;
      try {
        robot.path = announce(plan_path(world_, m.start, m.goal, r, {}, sim.planner), i);
      } catch (const PlanningError&) {
        if (scripted) throw;
        continue;
      }
      robot.mission = m;
      placed = true;
    }
    if (!placed) throw SamplingExhausted("could not place robot " + std::to_string(i));

    robot.patience = rng.uniform(sim.patience_min, sim.patience_max);
    const auto& w = robot.path.waypoints;
    const Point2 aim = w.size() > 1 ? w[1] : robot.mission.goal;
    const Point2 d = aim - robot.mission.start;
    robot.pose = Pose2(robot.mission.start, d.squared_norm() > 0.0 ? std::atan2(d.y, d.x) : 0.0);
    robot.progress_history.push_back({0.0, robot.mission.start, false});
    robots_.push_back(std::move(robot));
  }
}

std::vector<Disc> Simulation::others_as_discs(const RobotState& self) const {
  std::vector<Disc> out;
  for (const auto& o : robots_) {
    if (o.id == self.id || o.terminal()) continue;
    out.push_back({o.pose.position(), o.radius});
  }
  return out;
}

void Simulation::set_trace(std::ostream* out) {
  trace_ = out;
  if (trace_) write_header();
}

void Simulation::write_header() {
  ordered pillars = ordered::array();
  for (const auto& p : world_.pillars()) pillars.push_back({p.center.x, p.center.y, p.radius});
  ordered robots = ordered::array();
  ordered paths = ordered::array();
  for (const auto& r : robots_) {
    robots.push_back({{"id", r.id},
                      {"radius", r.radius},
                      {"start", {r.mission.start.x, r.mission.start.y}},
                      {"goal", {r.mission.goal.x, r.mission.goal.y}},
                      {"heading", r.pose.heading},
                      {"patience", r.patience}});
    paths.push_back(path_json(r.path));
  }
  ordered header;
  header["type"] = "header";
  header["mode"] = to_string(cfg_.mode);
  header["seed"] = seed_;
  header["dt"] = cfg_.sim.dt;
  header["world"] = {{"width", world_.width()}, {"height", world_.height()}, {"pillars", pillars}};
  header["robots"] = std::move(robots);
  header["paths"] = std::move(paths);
  *trace_ << header.dump() << '\n';
}

void Simulation::write_record(const std::vector<Command>& cmds,
                              const std::vector<RobotId>& new_paths) {
  ordered rec;
  rec["t"] = now();
  ordered robots = ordered::array();
  for (const auto& r : robots_) {
    robots.push_back({{"id", r.id},
                      {"x", r.pose.x},
                      {"y", r.pose.y},
                      {"heading", r.pose.heading},
                      {"status", to_string(r.status)},
                      {"replans", r.replan_count}});
  }
  rec["robots"] = std::move(robots);
  ordered zones = ordered::array();
  if (coordinator_) {
    for (const auto& z : coordinator_->zones()) {
      zones.push_back({{"id", z.id},
                       {"bbox", box_json(z.bbox)},
                       {"stop_area", box_json(z.stop_area)},
                       {"occupied", z.occupied()}});
    }
  }
  rec["zones"] = std::move(zones);
  ordered commands = ordered::array();
  for (const auto& c : cmds) {
    commands.push_back({{"robot", c.robot_id}, {"verdict", to_string(c.verdict)}, {"zone", c.zone_id}});
  }
  rec["cmds"] = std::move(commands);
  if (!new_paths.empty()) {
    ordered paths = ordered::array();
    for (RobotId id : new_paths) paths.push_back(path_json(robots_[static_cast<std::size_t>(id)].path));
    rec["paths"] = std::move(paths);
  }
  *trace_ << rec.dump() << '\n';
}

bool Simulation::finished() const {
  return std::all_of(robots_.begin(), robots_.end(), [](const RobotState& r) { return r.terminal(); });
}

std::vector<SimEvent> Simulation::step() {
  std::vector<SimEvent> events;
  if (finished()) return events;
  const auto& sim = cfg_.sim;
  const double t0 = now();
  const std::size_t n = robots_.size();

  std::vector<bool> active(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = robots_[i];
    if (r.terminal()) continue;
    active[i] = true;
    if (distance(r.pose.position(), r.mission.goal) <= sim.goal_tolerance) {
      r.status = NavStatus::reached;
      r.time_to_goal = t0;
      events.push_back({SimEventKind::reached, r.id, t0});
    }
  }

  // Coordinator verdicts.
  std::vector<Command> cmds;
  std::map<RobotId, Verdict> verdicts;
  if (coordinator_) {
    Snapshot snap;
    for (const auto& r : robots_) {
      if (r.terminal()) continue;
      snap.poses.push_back({r.id, r.pose, t0});
      snap.paths.push_back(r.path);
    }
    cmds = coordinator_->tick(snap, t0);
    commands_issued_ += static_cast<int>(cmds.size());
    largest_cluster_ = std::max(largest_cluster_, static_cast<int>(coordinator_->largest_cluster()));
    for (const auto& c : cmds) verdicts[c.robot_id] = c.verdict;
  }
  for (auto& r : robots_) {
    if (r.terminal()) continue;
    const auto it = verdicts.find(r.id);
    const bool held = it != verdicts.end() && it->second == Verdict::stop;
    if (held && r.status != NavStatus::held) events.push_back({SimEventKind::held, r.id, t0});
    if (!held && r.status == NavStatus::held) events.push_back({SimEventKind::released, r.id, t0});
    r.status = held ? NavStatus::held : NavStatus::navigating;
  }

  // Every robot decides on the same pre-step world state.
  std::vector<VelocityCommand> chosen(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = robots_[i];
    if (r.terminal() || r.status == NavStatus::held) continue;
    const auto others = others_as_discs(r);
    const LidarScan scan = simulate_lidar(world_, others, r.pose, sim.lidar);
    const auto cmd = select_command({r.pose, r.velocity, r.radius}, r.path, scan, sim.dwa);
    if (cmd) {
      chosen[i] = *cmd;
    } else {
      events.push_back({SimEventKind::infeasible, r.id, t0});
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!active[i]) continue;
    auto& r = robots_[i];
    ++r.steps_active;
    if (r.terminal()) continue;
    if (r.status == NavStatus::held) ++r.held_steps;
    const Point2 before = r.pose.position();
    r.pose = integrate(r.pose, chosen[i], sim.dt);
    r.velocity = chosen[i];
    r.distance_travelled += distance(before, r.pose.position());
  }
  ++step_index_;
  const double t1 = now();

  // Contacts are counted once per episode.
  for (std::size_t i = 0; i < n; ++i) {
    if (!active[i]) continue;
    const auto& r = robots_[i];
    const bool hit = !is_free(world_, r.pose.position(), r.radius);
    if (hit && !obstacle_contact_[i]) {
      ++obstacle_collisions_;
      events.push_back({SimEventKind::obstacle_collision, r.id, t1});
    }
    obstacle_contact_[i] = hit;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!active[j]) continue;
      const auto& o = robots_[j];
      const bool touch = distance(r.pose.position(), o.pose.position()) < r.radius + o.radius;
      if (touch && !robot_contact_[i][j]) {
        ++robot_collisions_;
        events.push_back({SimEventKind::robot_collision, r.id, t1, o.id});
      }
      robot_contact_[i][j] = touch;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    auto& r = robots_[i];
    if (!active[i] || r.terminal()) continue;
    if (distance(r.pose.position(), r.mission.goal) <= sim.goal_tolerance) {
      r.status = NavStatus::reached;
      r.time_to_goal = t1;
      events.push_back({SimEventKind::reached, r.id, t1});
    } else if (t1 >= sim.timeout - 1e-9) {
      r.status = NavStatus::timed_out;
      events.push_back({SimEventKind::timed_out, r.id, t1});
    }
  }

  std::vector<RobotId> new_paths;
  for (auto& r : robots_) {
    if (r.terminal()) continue;
    const bool held = r.status == NavStatus::held;
    auto& h = r.progress_history;
    h.push_back({t1, r.pose.position(), held});
    while (h.size() >= 2 && h[1].t <= t1 - r.patience + 1e-9) h.pop_front();
    if (!held && detect_stuck(r, t1, sim.stuck_threshold)) {
      events.push_back({SimEventKind::stuck, r.id, t1});
      if (trigger_replan(r.id, &events) == ReplanOutcome::replanned) new_paths.push_back(r.id);
    }
  }

  if (trace_) write_record(cmds, new_paths);
  return events;
}

ReplanOutcome Simulation::trigger_replan(RobotId id, std::vector<SimEvent>* events) {
  auto& r = robots_.at(static_cast<std::size_t>(id));
  const double t = now();
  ++r.replan_count;
  r.status = NavStatus::replanning;
  r.progress_history.clear();
  r.progress_history.push_back({t, r.pose.position(), false});

  // Other robots become obstacles, shrunk where needed so the start stays free.
  std::vector<Disc> extra;
  for (auto d : others_as_discs(r)) {
    const double room = distance(d.center, r.pose.position()) - r.radius - 1e-6;
    if (room <= 0.0) continue;
    d.radius = std::min(d.radius, room);
    extra.push_back(d);
  }
  try {
    r.path = announce(
        plan_path(world_, r.pose.position(), r.mission.goal, r.radius, extra, cfg_.sim.planner), id);
    if (events) events->push_back({SimEventKind::replanned, id, t});
    return ReplanOutcome::replanned;
  } catch (const PlanningError& e) {
    if (events) events->push_back({SimEventKind::replan_failed, id, t, -1, e.what()});
    return ReplanOutcome::no_path;
  }
}

TrialResult Simulation::result() const {
  TrialResult out;
  out.mode = cfg_.mode;
  out.n_robots = cfg_.n_robots;
  out.seed = seed_;
  out.robot_collisions = robot_collisions_;
  out.obstacle_collisions = obstacle_collisions_;
  out.commands_issued = commands_issued_;
  out.largest_cluster = largest_cluster_;
  out.sim_time = now();
  for (const auto& r : robots_) {
    RobotResult rr;
    rr.id = r.id;
    rr.success = r.status == NavStatus::reached;
    rr.steps = r.steps_active;
    rr.distance = r.distance_travelled;
    rr.avg_speed = r.steps_active > 0 ? r.distance_travelled / r.steps_active * 100.0 : 0.0;
    rr.replans = r.replan_count;
    rr.time_to_goal = r.time_to_goal;
    rr.held_steps = r.held_steps;
    out.robots.push_back(rr);
  }
  return out;
}

TrialResult run_trial(const TrialConfig& cfg, std::uint64_t seed, std::ostream* trace) {
  const auto started = std::chrono::steady_clock::now();
  TrialResult out;
  try {
    Simulation sim(cfg, seed);
    sim.set_trace(trace);
    while (!sim.finished()) sim.step();
    out = sim.result();
  } catch (const SamplingExhausted& e) {
    out.mode = cfg.mode;
    out.n_robots = cfg.missions.empty() ? cfg.n_robots : static_cast<int>(cfg.missions.size());
    out.seed = seed;
    out.error = e.what();
  }
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return out;
}

}  // namespace mrc
