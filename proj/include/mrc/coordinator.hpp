#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "mrc/geometry.hpp"
#include "mrc/global_planner.hpp"

namespace mrc {

struct CoordinatorConfig {
  double eta_threshold = 5.0;
  double robot_diameter = 3.0;
  /// Stop area = conflict bbox inflated by this much on every side.
  double stop_margin = 6.0;
  /// Speed used to refresh ETAs from live poses.
  double nominal_speed = 1.6;
  /// Poses older than this relative to the tick time are rejected.
  double staleness_bound = 1.0;
  /// A path passing closer than robot_diameter + block_margin to a waiting
  /// robot is treated as blocked by it when ordering a zone.
  double block_margin = 0.0;
};

/// Inclusive range of segment indices into a path.
struct IndexRange {
  std::size_t first = 0;
  std::size_t last = 0;
};

struct Conflict {
  RobotId robot_a = 0;
  RobotId robot_b = 0;
  IndexRange segment_a;
  IndexRange segment_b;
  Box region;
};

struct ConflictCluster {
  std::vector<RobotId> members;  // sorted
  Box bbox;
};

enum class ZoneMode { dynamic, static_fcfs };

struct ConflictZone {
  int id = 0;
  Box bbox;
  Box stop_area;
  std::set<RobotId> members;
  std::set<RobotId> occupants;
  ZoneMode mode = ZoneMode::dynamic;
  std::vector<RobotId> fcfs_queue;

  bool occupied() const { return !occupants.empty(); }
};

enum class Verdict { stop, proceed };

std::string_view to_string(Verdict v);

struct Command {
  RobotId robot_id = 0;
  Verdict verdict = Verdict::proceed;
  int zone_id = 0;
  double issued_at = 0.0;

  bool operator==(const Command&) const = default;
};

/// Witness of a segment-pair conflict: parameters on each segment.
struct SegmentConflict {
  double s = 0.0;
  double t = 0.0;
  double distance = 0.0;
};

/// Exact test: is there a point on [p0,p1] and one on [q0,q1] closer than
/// `min_distance` whose linearly interpolated ETAs differ by at most `eta_threshold`?
std::optional<SegmentConflict> segment_conflict(const Point2& p0, const Point2& p1, double ea0,
                                                double ea1, const Point2& q0, const Point2& q1,
                                                double eb0, double eb1, double eta_threshold,
                                                double min_distance);

/// True iff any segment pair of the two timed paths conflicts.
bool paths_conflict(const PlannedPath& a, const PlannedPath& b, double eta_threshold,
                    double min_distance);

/// Pairwise conflicts between all paths. Adjacent conflicting segment pairs of
/// the same robots are merged into one Conflict.
std::vector<Conflict> detect_conflicts(std::span<const PlannedPath> paths, double eta_threshold,
                                       double min_distance = 3.0);

/// Connected components of the conflict graph.
std::vector<ConflictCluster> cluster_conflicts(std::span<const Conflict> conflicts);

/// A robot as seen by the coordinator in one tick.
struct RobotTrack {
  RobotId id = 0;
  Pose2 pose;
  PlannedPath path;  ///< remaining path from the current pose, ETAs from now
};

/// Leading stretch of the path inside `area`, clipped at the first exit.
PlannedPath clip_to_area(const PlannedPath& path, const Box& area);

/// Proximity-priority resolution for a dynamic zone. Robots outside the
/// stop area get no command.
std::vector<Command> resolve_zone(const ConflictZone& zone, std::span<const RobotTrack> robots,
                                  const CoordinatorConfig& cfg, double now);

struct Arrival {
  RobotId robot_id = 0;
  double time = 0.0;
};

/// First-come first-served resolution for a static zone.
std::vector<Command> resolve_fcfs(const ConflictZone& zone, std::span<const Arrival> arrivals,
                                  double now);

struct PoseReport {
  RobotId id = 0;
  Pose2 pose;
  double stamp = 0.0;
};

struct Snapshot {
  std::vector<PoseReport> poses;
  std::vector<PlannedPath> paths;
};

/// Centralized virtual traffic light. Ticks are serialized; callers feed
/// poses and paths between ticks.
class Coordinator {
 public:
  explicit Coordinator(CoordinatorConfig cfg = {});

  const CoordinatorConfig& config() const { return cfg_; }

  /// Registers a pre-defined intersection handled first-come first-served.
  int add_static_zone(const Box& bbox);

  void update_path(PlannedPath path);
  void update_pose(const PoseReport& report);
  void remove_robot(RobotId id);

  /// Replaces all poses and paths with the snapshot, then ticks.
  std::vector<Command> tick(const Snapshot& snapshot, double now);

  /// Throws StaleSnapshot when a pose is older than the staleness bound.
  std::vector<Command> tick(double now);

  const std::vector<ConflictZone>& zones() const { return zones_; }
  /// Size of the largest cluster found in the last tick.
  std::size_t largest_cluster() const { return largest_cluster_; }
  /// Remaining, ETA-refreshed paths used in the last tick.
  const std::vector<RobotTrack>& tracks() const { return tracks_; }

 private:
  void update_dynamic_zones(std::span<const ConflictCluster> clusters);
  std::vector<Command> resolve_static(ConflictZone& zone, double now);

  CoordinatorConfig cfg_;
  std::map<RobotId, PlannedPath> paths_;
  std::map<RobotId, PoseReport> poses_;
  std::vector<ConflictZone> zones_;  // sorted by id
  std::vector<RobotTrack> tracks_;
  std::map<int, std::map<RobotId, double>> arrivals_;     // static zone -> arrival times
  std::map<int, std::set<RobotId>> entered_;              // static zone -> robots seen inside bbox
  std::map<int, std::set<RobotId>> passed_;               // static zone -> crossed, still nearby
  int next_zone_id_ = 1;
  std::size_t largest_cluster_ = 0;
};

}  // namespace mrc
