#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mrc/geometry.hpp"
#include "mrc/world.hpp"

namespace mrc {

struct TraceRobot {
  RobotId id = 0;
  Pose2 pose;
  std::string status;
};

struct TraceZone {
  int id = 0;
  Box bbox;
  Box stop_area;
  bool occupied = false;
};

struct TraceFrame {
  double t = 0.0;
  std::vector<TraceRobot> robots;
  std::vector<TraceZone> zones;
  /// Number of STOP commands issued on this step.
  int stops = 0;
  /// Current global path of each robot, indexed by robot id.
  std::vector<std::vector<Point2>> paths;
};

struct Trace {
  std::string mode;
  std::uint64_t seed = 0;
  double dt = 0.0;
  double width = 0.0;
  double height = 0.0;
  std::vector<Pillar> pillars;
  std::vector<double> radii;
  std::vector<Point2> starts;
  std::vector<Point2> goals;
  std::vector<TraceFrame> frames;
};

/// Parses an NDJSON trace written by Simulation::set_trace. Throws ProtocolError.
Trace read_trace(std::istream& in);

/// Snapshot after `frame`: pillars black, planned paths dotted, traversed paths
/// solid, zones green when empty and red when occupied.
std::string render_frame(const Trace& trace, std::size_t frame);

/// Writes every `stride`-th frame plus the last one as step_NNNNN.svg.
/// Returns the number of files written.
std::size_t write_replay(const Trace& trace, const std::filesystem::path& dir, std::size_t stride = 1);

}  // namespace mrc
