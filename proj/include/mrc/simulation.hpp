#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrc/coordinator.hpp"
#include "mrc/global_planner.hpp"
#include "mrc/local_planner.hpp"
#include "mrc/world.hpp"

namespace mrc {

enum class Mode { hybrid, decentralized };

std::string_view to_string(Mode m);
/// Accepts "hybrid" / "decentralized" (case-insensitive). Throws InvalidConfig.
Mode parse_mode(std::string_view text);

enum class NavStatus { navigating, held, replanning, reached, timed_out };

std::string_view to_string(NavStatus s);

struct ProgressSample {
  double t = 0.0;
  Point2 position;
  bool held = false;
};

struct RobotState {
  RobotId id = 0;
  Pose2 pose;
  VelocityCommand velocity;
  double radius = 1.5;
  Mission mission;
  PlannedPath path;
  NavStatus status = NavStatus::navigating;
  double patience = 3.0;
  std::deque<ProgressSample> progress_history;
  int replan_count = 0;
  double distance_travelled = 0.0;

  int steps_active = 0;
  int held_steps = 0;
  std::optional<double> time_to_goal;

  bool terminal() const { return status == NavStatus::reached || status == NavStatus::timed_out; }
};

struct SimConfig {
  WorldConfig world;
  double robot_radius = 1.5;
  DwaConfig dwa;
  LidarConfig lidar;
  /// nominal_speed and robot_diameter are derived from the fields below.
  CoordinatorConfig coordinator;
  PlannerOptions planner;
  MissionOptions missions;
  double dt = 0.1;
  double timeout = 135.0;
  double goal_tolerance = 1.5;
  /// Net displacement below this over the patience window counts as stuck.
  double stuck_threshold = 0.5;
  double patience_min = 3.0;
  double patience_max = 6.0;
  /// ETA speed as a fraction of v_max.
  double eta_speed_fraction = 0.8;

  /// Throws InvalidConfig.
  void validate() const;
};

struct TrialConfig {
  Mode mode = Mode::hybrid;
  int n_robots = 1;
  SimConfig sim;
  /// Scripted missions; when non-empty they replace sampling and set the robot count.
  std::vector<Mission> missions;
};

enum class SimEventKind {
  reached,
  timed_out,
  held,
  released,
  infeasible,
  stuck,
  replanned,
  replan_failed,
  robot_collision,
  obstacle_collision,
};

std::string_view to_string(SimEventKind k);

struct SimEvent {
  SimEventKind kind;
  RobotId robot = 0;
  double t = 0.0;
  RobotId other = -1;
  std::string detail;
};

struct RobotResult {
  RobotId id = 0;
  bool success = false;
  /// Displacement per simulation step x 100.
  double avg_speed = 0.0;
  int replans = 0;
  std::optional<double> time_to_goal;
  double distance = 0.0;
  int steps = 0;
  int held_steps = 0;
};

struct TrialResult {
  Mode mode = Mode::hybrid;
  int n_robots = 0;
  std::uint64_t seed = 0;
  std::vector<RobotResult> robots;
  int robot_collisions = 0;
  int obstacle_collisions = 0;
  int commands_issued = 0;
  int largest_cluster = 0;
  double sim_time = 0.0;
  double wall_ms = 0.0;
  /// Set when the trial could not run (e.g. mission sampling failed).
  std::string error;

  double success_rate() const;
  double mean_speed() const;
  int total_replans() const;
};

/// True iff the robot moved less than `threshold` over its trailing patience
/// window and was not held by the coordinator at any point in that window.
bool detect_stuck(const RobotState& robot, double now, double threshold);

enum class ReplanOutcome { replanned, no_path };

/// Discrete-time multi-robot simulation. Deterministic given (config, seed).
class Simulation {
 public:
  /// Throws InvalidConfig or SamplingExhausted.
  Simulation(TrialConfig cfg, std::uint64_t seed);
  ~Simulation();

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  /// Writes a header line now and one NDJSON record per step afterwards.
  void set_trace(std::ostream* out);

  std::vector<SimEvent> step();
  bool finished() const;
  double now() const { return static_cast<double>(step_index_) * cfg_.sim.dt; }
  int step_index() const { return step_index_; }

  const std::vector<RobotState>& robots() const { return robots_; }
  const WorldMap& world() const { return world_; }
  const TrialConfig& config() const { return cfg_; }
  /// Null in decentralized mode.
  const Coordinator* coordinator() const { return coordinator_.get(); }

  /// Re-plans around the other robots' current positions.
  ReplanOutcome trigger_replan(RobotId id, std::vector<SimEvent>* events = nullptr);

  TrialResult result() const;

 private:
  void place_robots(std::uint64_t seed);
  std::vector<Disc> others_as_discs(const RobotState& self) const;
  PlannedPath announce(PlannedPath path, RobotId id) const;
  void write_header();
  void write_record(const std::vector<Command>& cmds, const std::vector<RobotId>& new_paths);

  TrialConfig cfg_;
  std::uint64_t seed_;
  WorldMap world_;
  std::vector<RobotState> robots_;
  std::unique_ptr<Coordinator> coordinator_;
  int step_index_ = 0;
  int robot_collisions_ = 0;
  int obstacle_collisions_ = 0;
  int commands_issued_ = 0;
  int largest_cluster_ = 0;
  std::vector<std::vector<bool>> robot_contact_;
  std::vector<bool> obstacle_contact_;
  std::ostream* trace_ = nullptr;
};

/// Runs to completion. Sampling failures are reported in TrialResult::error.
TrialResult run_trial(const TrialConfig& cfg, std::uint64_t seed, std::ostream* trace = nullptr);

}  // namespace mrc
