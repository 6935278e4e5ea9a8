#pragma once

#include <deque>
#include <mutex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mrc/coordinator.hpp"

namespace mrc {

// Newline-delimited JSON binding for the coordinator:
//   in:  {"type":"path","robot":<id>,"waypoints":[[x,y],...],"etas":[...]}
//   in:  {"type":"pose","robot":<id>,"x":..,"y":..,"heading":..,"t":..}
//   out: {"type":"cmd","robot":<id>,"verdict":"STOP"|"PROCEED","zone":<id>,"t":..}

using InboundMessage = std::variant<PlannedPath, PoseReport>;

/// Throws ProtocolError on malformed input.
InboundMessage parse_message(std::string_view line);

std::string format_path(const PlannedPath& path);
std::string format_pose(const PoseReport& pose);
std::string format_command(const Command& cmd);

/// Queues inbound messages from any thread and applies them between ticks.
class CoordinatorService {
 public:
  explicit CoordinatorService(CoordinatorConfig cfg = {});

  Coordinator& coordinator() { return coordinator_; }

  /// Parses and queues one line; blank lines are ignored.
  void submit(std::string_view line);

  /// Drains the queue into the coordinator, ticks, and returns outbound lines.
  std::vector<std::string> tick(double now);

  /// Latest pose timestamp seen so far (queued or applied).
  double latest_stamp() const;

 private:
  mutable std::mutex mutex_;
  std::deque<InboundMessage> inbox_;
  double latest_stamp_ = 0.0;
  Coordinator coordinator_;
};

}  // namespace mrc
