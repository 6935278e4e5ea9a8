#include <doctest.h>

#include <thread>

#include <json.hpp>

#include "mrc/errors.hpp"
#include "mrc/global_planner.hpp"
#include "mrc/service.hpp"

using namespace mrc;
using nlohmann::json;

TEST_CASE("path and pose messages round-trip") {
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    PlannedPath p;
    p.robot_id = static_cast<RobotId>(rng.next() % 50);
    const int n = 1 + static_cast<int>(rng.next() % 6);
    double eta = rng.uniform(0, 100);
    for (int k = 0; k < n; ++k) {
      p.waypoints.push_back({rng.uniform(0, 50), rng.uniform(0, 50)});
      p.etas.push_back(eta);
      eta += rng.uniform(0, 5);
    }
    const auto back = std::get<PlannedPath>(parse_message(format_path(p)));
    CHECK(back.robot_id == p.robot_id);
    CHECK(back.waypoints == p.waypoints);
    CHECK(back.etas == p.etas);

    const PoseReport pose{p.robot_id, Pose2(rng.uniform(0, 50), rng.uniform(0, 50), rng.uniform(-3, 3)), eta};
    const auto pb = std::get<PoseReport>(parse_message(format_pose(pose)));
    CHECK(pb.id == pose.id);
    CHECK(pb.pose.x == pose.pose.x);
    CHECK(pb.pose.y == pose.pose.y);
    CHECK(pb.pose.heading == doctest::Approx(pose.pose.heading));
    CHECK(pb.stamp == pose.stamp);
  }
}

TEST_CASE("command lines carry robot, verdict, zone and time") {
  const json j = json::parse(format_command({3, Verdict::stop, 7, 12.5}));
  CHECK(j["type"] == "cmd");
  CHECK(j["robot"] == 3);
  CHECK(j["verdict"] == "STOP");
  CHECK(j["zone"] == 7);
  CHECK(j["t"] == 12.5);
}

TEST_CASE("malformed messages are rejected") {
  const char* bad[] = {
      "not json",
      "[1,2]",
      R"({"robot":1})",
      R"({"type":"wave","robot":1})",
      R"({"type":"pose","robot":"a","x":0,"y":0,"heading":0,"t":0})",
      R"({"type":"pose","robot":1,"x":0,"y":0,"heading":0})",
      R"({"type":"pose","robot":1,"x":"0","y":0,"heading":0,"t":0})",
      R"({"type":"path","robot":1,"waypoints":[],"etas":[]})",
      R"({"type":"path","robot":1,"waypoints":[[0,0],[1,1]],"etas":[0]})",
      R"({"type":"path","robot":1,"waypoints":[[0,0],[1]],"etas":[0,1]})",
      R"({"type":"path","robot":1,"waypoints":[[0,0],[1,1]],"etas":[2,1]})",
  };
  for (const char* line : bad) CHECK_THROWS_AS(parse_message(line), ProtocolError);
}

TEST_CASE("service applies queued messages on tick") {
  CoordinatorService svc;
  CHECK(svc.tick(0.0).empty());
  PlannedPath a, b;
  a.robot_id = 0;
  a.waypoints = {{21, 25}, {40, 25}};
  b.robot_id = 1;
  b.waypoints = {{25, 19}, {25, 40}};
  svc.submit(format_path(annotate_etas(a, 1.6, 0)));
  svc.submit(format_path(annotate_etas(b, 1.6, 0)));
  svc.submit("");
  svc.submit(format_pose({0, Pose2(21, 25, 0), 0.0}));
  svc.submit(format_pose({1, Pose2(25, 19, 1.57), 0.1}));
  CHECK(svc.latest_stamp() == 0.1);
  const auto out = svc.tick(svc.latest_stamp());
  REQUIRE(out.size() == 2);
  std::map<int, std::string> verdicts;
  for (const auto& line : out) {
    const json j = json::parse(line);
    verdicts[j["robot"].get<int>()] = j["verdict"].get<std::string>();
    CHECK(j["t"] == 0.1);
  }
  CHECK(verdicts[0] == "PROCEED");
  CHECK(verdicts[1] == "STOP");
  CHECK_THROWS_AS(svc.submit("{"), ProtocolError);
}

TEST_CASE("concurrent submitters lose no messages") {
  CoordinatorService svc;
  constexpr int threads = 4, per_thread = 250;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      PlannedPath p;
      p.robot_id = t;
      p.waypoints = {{5.0 + 10 * t, 5}, {5.0 + 10 * t, 45}};
      svc.submit(format_path(annotate_etas(p, 1.6, 0)));
      for (int i = 0; i < per_thread; ++i) {
        const double stamp = 0.001 * (t * per_thread + i);
        svc.submit(format_pose({t, Pose2(5.0 + 10 * t, 5.0 + 0.1 * i, 1.57), stamp}));
      }
    });
  }
  for (auto& th : pool) th.join();
  CHECK(svc.latest_stamp() == doctest::Approx(0.001 * (threads * per_thread - 1)));
  svc.tick(svc.latest_stamp());
  const auto& tracks = svc.coordinator().tracks();
  REQUIRE(tracks.size() == threads);
  for (const auto& tr : tracks) {
    CHECK(tr.pose.x == doctest::Approx(5.0 + 10 * tr.id));
    CHECK(tr.pose.y == doctest::Approx(5.0 + 0.1 * (per_thread - 1)));
  }
}
