#include "mrc/service.hpp"

#include <json.hpp>

#include "mrc/errors.hpp"

namespace mrc {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

const json& field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ProtocolError(std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw ProtocolError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

RobotId robot_id(const json& j) {
  const json& v = field(j, "robot");
  if (!v.is_number_integer()) throw ProtocolError("field 'robot' must be an integer");
  return v.get<RobotId>();
}

}  // namespace

InboundMessage parse_message(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError("message must be a JSON object");
  const json& type = field(j, "type");
  if (!type.is_string()) throw ProtocolError("field 'type' must be a string");

  if (type == "pose") {
    PoseReport p;
    p.id = robot_id(j);
    p.pose = Pose2(number(j, "x"), number(j, "y"), number(j, "heading"));
    p.stamp = number(j, "t");
    return p;
  }
  if (type == "path") {
    PlannedPath path;
    path.robot_id = robot_id(j);
    const json& wps = field(j, "waypoints");
    const json& etas = field(j, "etas");
    if (!wps.is_array() || !etas.is_array()) throw ProtocolError("waypoints and etas must be arrays");
    if (wps.empty()) throw ProtocolError("path needs at least one waypoint");
    if (wps.size() != etas.size()) throw ProtocolError("waypoints and etas differ in length");
    for (const auto& w : wps) {
      if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number()) {
        throw ProtocolError("waypoint must be [x, y]");
      }
      path.waypoints.push_back({w[0].get<double>(), w[1].get<double>()});
    }
    for (const auto& e : etas) {
      if (!e.is_number()) throw ProtocolError("etas must be numbers");
      const double v = e.get<double>();
      if (!path.etas.empty() && v < path.etas.back()) throw ProtocolError("etas must not decrease");
      path.etas.push_back(v);
    }
    path.announced_at = path.etas.front();
    return path;
  }
  throw ProtocolError("unknown message type '" + type.get<std::string>() + "'");
}

std::string format_path(const PlannedPath& path) {
  ordered j;
  j["type"] = "path";
  j["robot"] = path.robot_id;
  ordered wps = ordered::array();
  for (const auto& w : path.waypoints) wps.push_back({w.x, w.y});
  j["waypoints"] = std::move(wps);
  j["etas"] = path.etas;
  return j.dump();
}

std::string format_pose(const PoseReport& pose) {
  ordered j;
  j["type"] = "pose";
  j["robot"] = pose.id;
  j["x"] = pose.pose.x;
  j["y"] = pose.pose.y;
  j["heading"] = pose.pose.heading;
  j["t"] = pose.stamp;
  return j.dump();
}

std::string format_command(const Command& cmd) {
  ordered j;
  j["type"] = "cmd";
  j["robot"] = cmd.robot_id;
  j["verdict"] = to_string(cmd.verdict);
  j["zone"] = cmd.zone_id;
  j["t"] = cmd.issued_at;
  return j.dump();
}

CoordinatorService::CoordinatorService(CoordinatorConfig cfg) : coordinator_(cfg) {}

void CoordinatorService::submit(std::string_view line) {
  if (line.find_first_not_of(" \t\r\n") == std::string_view::npos) return;
  InboundMessage msg = parse_message(line);
  std::lock_guard lock(mutex_);
  if (const auto* pose = std::get_if<PoseReport>(&msg)) {
    latest_stamp_ = std::max(latest_stamp_, pose->stamp);
  }
  inbox_.push_back(std::move(msg));
}

std::vector<std::string> CoordinatorService::tick(double now) {
  std::deque<InboundMessage> batch;
  {
    std::lock_guard lock(mutex_);
    batch.swap(inbox_);
  }
  for (auto& msg : batch) {
    if (auto* path = std::get_if<PlannedPath>(&msg)) {
      coordinator_.update_path(std::move(*path));
    } else {
      coordinator_.update_pose(std::get<PoseReport>(msg));
    }
  }
  std::vector<std::string> out;
  for (const auto& cmd : coordinator_.tick(now)) out.push_back(format_command(cmd));
  return out;
}

double CoordinatorService::latest_stamp() const {
  std::lock_guard lock(mutex_);
  return latest_stamp_;
}

}  // namespace mrc
