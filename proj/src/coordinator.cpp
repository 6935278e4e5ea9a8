#include "mrc/coordinator.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mrc/errors.hpp"

namespace mrc {

namespace {

struct ST {
  double s;
  double t;
};

// Sutherland-Hodgman clip of a convex polygon in (s,t) by h(s,t) >= 0.
template <typename H>
std::vector<ST> clip_polygon(const std::vector<ST>& poly, H h) {
  std::vector<ST> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const ST& cur = poly[i];
    const ST& nxt = poly[(i + 1) % n];
    const double hc = h(cur);
    const double hn = h(nxt);
    const bool cin = hc >= 0.0;
    const bool nin = hn >= 0.0;
    if (cin) out.push_back(cur);
    if (cin != nin) {
      const double u = hc / (hc - hn);
      out.push_back({cur.s + u * (nxt.s - cur.s), cur.t + u * (nxt.t - cur.t)});
    }
  }
  return out;
}

struct TimedSegment {
  std::size_t index;
  Point2 a;
  Point2 b;
  double ea;
  double eb;
  Box box;
};

std::vector<TimedSegment> timed_segments(const PlannedPath& path) {
  std::vector<TimedSegment> out;
  const auto& w = path.waypoints;
  const auto& e = path.etas;
  if (w.empty()) return out;
  auto eta = [&](std::size_t i) { return i < e.size() ? e[i] : 0.0; };
  if (w.size() == 1) {
    out.push_back({0, w[0], w[0], eta(0), eta(0), Box::around(w[0])});
    return out;
  }
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    out.push_back({i, w[i], w[i + 1], eta(i), eta(i + 1), Box::around(w[i]).expanded(w[i + 1])});
  }
  return out;
}

bool may_conflict(const TimedSegment& x, const TimedSegment& y, double eta_threshold,
                  double min_distance) {
  const Box bx = x.box.inflated(min_distance);
  if (bx.x1 < y.box.x0 || y.box.x1 < bx.x0 || bx.y1 < y.box.y0 || y.box.y1 < bx.y0) return false;
  const double x_lo = std::min(x.ea, x.eb);
  const double x_hi = std::max(x.ea, x.eb);
  const double y_lo = std::min(y.ea, y.eb);
  const double y_hi = std::max(y.ea, y.eb);
  return !(x_lo > y_hi + eta_threshold || y_lo > x_hi + eta_threshold);
}

std::optional<SegmentConflict> check(const TimedSegment& x, const TimedSegment& y,
                                     double eta_threshold, double min_distance) {
  if (!may_conflict(x, y, eta_threshold, min_distance)) return std::nullopt;
  return segment_conflict(x.a, x.b, x.ea, x.eb, y.a, y.b, y.ea, y.eb, eta_threshold,
                          min_distance);
}

// Grows `box` with the points of [p0,p1] that have a partner on [q0,q1]
// within `min_distance` and within the ETA threshold.
void add_conflict_points(Box& box, const Point2& p0, const Point2& p1, double ea0, double ea1,
                         const Point2& q0, const Point2& q1, double eb0, double eb1,
                         double eta_threshold, double min_distance) {
  constexpr double kStep = 0.25;
  const Point2 dp = p1 - p0;
  const Point2 dq = q1 - q0;
  const double dq2 = dq.squared_norm();
  const double slope = eb1 - eb0;
  const int n = std::max(1, static_cast<int>(std::ceil(dp.norm() / kStep)));
  for (int k = 0; k <= n; ++k) {
    const double s = static_cast<double>(k) / n;
    const Point2 p = p0 + dp * s;
    const double eta = ea0 + (ea1 - ea0) * s;
    double lo = 0.0;
    double hi = 1.0;
    if (std::abs(slope) < 1e-12) {
      if (std::abs(eta - eb0) > eta_threshold) continue;
    } else {
      const double t1 = (eta - eta_threshold - eb0) / slope;
      const double t2 = (eta + eta_threshold - eb0) / slope;
      lo = std::max(0.0, std::min(t1, t2));
      hi = std::min(1.0, std::max(t1, t2));
      if (lo > hi) continue;
    }
    const double proj = dq2 > 0.0 ? (p - q0).dot(dq) / dq2 : 0.0;
    const double t = std::clamp(proj, lo, hi);
    const Point2 q = q0 + dq * t;
    if (distance(p, q) < min_distance) {
      box = box.expanded(p).expanded(q);
    }
  }
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

bool path_enters(const PlannedPath& path, const Box& box) {
  const auto& w = path.waypoints;
  if (w.size() == 1) return box.contains(w[0]);
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    double te = 0.0;
    double tx = 0.0;
    if (clip_segment(box, w[i], w[i + 1], te, tx)) return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(Verdict v) { return v == Verdict::stop ? "STOP" : "PROCEED"; }

std::optional<SegmentConflict> segment_conflict(const Point2& p0, const Point2& p1, double ea0,
                                                double ea1, const Point2& q0, const Point2& q1,
                                                double eb0, double eb1, double eta_threshold,
                                                double min_distance) {
  // Feasible (s,t): the unit square cut by the strip |eta_a(s) - eta_b(t)| <= threshold.
  const double c = ea0 - eb0;
  const double ka = ea1 - ea0;
  const double kb = eb1 - eb0;
  auto gap = [&](const ST& v) { return c + ka * v.s - kb * v.t; };
  constexpr double eps = 1e-12;
  std::vector<ST> poly{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  poly = clip_polygon(poly, [&](const ST& v) { return eta_threshold - gap(v) + eps; });
  if (poly.empty()) return std::nullopt;
  poly = clip_polygon(poly, [&](const ST& v) { return eta_threshold + gap(v) + eps; });
  if (poly.empty()) return std::nullopt;

  // Minimize the convex |P(s) - Q(t)|^2 over that polygon.
  const Point2 dp = p1 - p0;
  const Point2 dq = q1 - q0;
  const Point2 r = p0 - q0;
  auto sq = [&](double s, double t) { return (r + dp * s - dq * t).squared_norm(); };

  SegmentConflict best{0.0, 0.0, std::numeric_limits<double>::infinity()};
  auto consider = [&](double s, double t) {
    const double d2 = sq(s, t);
    if (d2 < best.distance) best = {s, t, d2};
  };

  const double a = dp.squared_norm();
  const double b = dp.dot(dq);
  const double e = dq.squared_norm();
  const double det = a * e - b * b;
  if (det > 1e-12 * std::max(1.0, a * e)) {
    const double d1 = r.dot(dp);
    const double d2 = r.dot(dq);
    const double s = (-d1 * e + b * d2) / det;
    const double t = (a * d2 - b * d1) / det;
    if (s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0 &&
        std::abs(gap({s, t})) <= eta_threshold + eps) {
      consider(s, t);
    }
  }
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const ST& v = poly[i];
    const ST& w = poly[(i + 1) % poly.size()];
    const Point2 base = r + dp * v.s - dq * v.t;
    const Point2 dir = dp * (w.s - v.s) - dq * (w.t - v.t);
    const double dd = dir.squared_norm();
    const double u = dd > 0.0 ? std::clamp(-base.dot(dir) / dd, 0.0, 1.0) : 0.0;
    consider(v.s + u * (w.s - v.s), v.t + u * (w.t - v.t));
  }

  best.distance = std::sqrt(best.distance);
  if (best.distance < min_distance) return best;
  return std::nullopt;
}

bool paths_conflict(const PlannedPath& a, const PlannedPath& b, double eta_threshold,
                    double min_distance) {
  const auto sa = timed_segments(a);
  const auto sb = timed_segments(b);
  for (const auto& x : sa) {
    for (const auto& y : sb) {
      if (check(x, y, eta_threshold, min_distance)) return true;
    }
  }
  return false;
}

std::vector<Conflict> detect_conflicts(std::span<const PlannedPath> paths, double eta_threshold,
                                       double min_distance) {
  std::vector<Conflict> out;
  std::vector<std::vector<TimedSegment>> segs;
  segs.reserve(paths.size());
  for (const auto& p : paths) segs.push_back(timed_segments(p));

  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (std::size_t j = i + 1; j < paths.size(); ++j) {
      if (paths[i].robot_id == paths[j].robot_id) continue;
      const bool swap = paths[j].robot_id < paths[i].robot_id;
      const auto& pa = swap ? paths[j] : paths[i];
      const auto& pb = swap ? paths[i] : paths[j];
      const auto& sa = swap ? segs[j] : segs[i];
      const auto& sb = swap ? segs[i] : segs[j];

      struct Hit {
        std::size_t ia;
        std::size_t ib;
        Box region;
      };
      std::vector<Hit> hits;
      for (const auto& x : sa) {
        for (const auto& y : sb) {
          const auto w = check(x, y, eta_threshold, min_distance);
          if (!w) continue;
          Box region = Box::around(x.a + (x.b - x.a) * w->s).expanded(y.a + (y.b - y.a) * w->t);
          add_conflict_points(region, x.a, x.b, x.ea, x.eb, y.a, y.b, y.ea, y.eb, eta_threshold,
                              min_distance);
          add_conflict_points(region, y.a, y.b, y.ea, y.eb, x.a, x.b, x.ea, x.eb, eta_threshold,
                              min_distance);
          hits.push_back({x.index, y.index, region});
        }
      }
      if (hits.empty()) continue;

      DisjointSets groups(hits.size());
      for (std::size_t u = 0; u < hits.size(); ++u) {
        for (std::size_t v = u + 1; v < hits.size(); ++v) {
          const auto dia = hits[u].ia > hits[v].ia ? hits[u].ia - hits[v].ia : hits[v].ia - hits[u].ia;
          const auto dib = hits[u].ib > hits[v].ib ? hits[u].ib - hits[v].ib : hits[v].ib - hits[u].ib;
          if (dia <= 1 && dib <= 1) groups.unite(u, v);
        }
      }
      std::map<std::size_t, Conflict> merged;
      for (std::size_t u = 0; u < hits.size(); ++u) {
        const auto root = groups.find(u);
        auto it = merged.find(root);
        if (it == merged.end()) {
          merged.emplace(root, Conflict{pa.robot_id, pb.robot_id, {hits[u].ia, hits[u].ia},
                                        {hits[u].ib, hits[u].ib}, hits[u].region});
          continue;
        }
        Conflict& c = it->second;
        c.segment_a.first = std::min(c.segment_a.first, hits[u].ia);
        c.segment_a.last = std::max(c.segment_a.last, hits[u].ia);
        c.segment_b.first = std::min(c.segment_b.first, hits[u].ib);
        c.segment_b.last = std::max(c.segment_b.last, hits[u].ib);
        c.region = c.region.united(hits[u].region);
      }
      for (auto& [root, c] : merged) out.push_back(c);
    }
  }
  return out;
}

std::vector<ConflictCluster> cluster_conflicts(std::span<const Conflict> conflicts) {
  std::map<RobotId, std::size_t> index;
  for (const auto& c : conflicts) {
    index.emplace(c.robot_a, 0);
    index.emplace(c.robot_b, 0);
  }
  std::vector<RobotId> ids;
  for (auto& [id, i] : index) {
    i = ids.size();
    ids.push_back(id);
  }
  DisjointSets sets(ids.size());
  for (const auto& c : conflicts) sets.unite(index[c.robot_a], index[c.robot_b]);

  std::map<std::size_t, ConflictCluster> by_root;
  for (std::size_t i = 0; i < ids.size(); ++i) by_root[sets.find(i)].members.push_back(ids[i]);
  std::map<std::size_t, bool> has_box;
  for (const auto& c : conflicts) {
    const auto root = sets.find(index[c.robot_a]);
    auto& cl = by_root[root];
    cl.bbox = has_box[root] ? cl.bbox.united(c.region) : c.region;
    has_box[root] = true;
  }
  std::vector<ConflictCluster> out;
  for (auto& [root, cl] : by_root) out.push_back(std::move(cl));
  return out;
}

PlannedPath clip_to_area(const PlannedPath& path, const Box& area) {
  PlannedPath out;
  out.robot_id = path.robot_id;
  out.announced_at = path.announced_at;
  const auto& w = path.waypoints;
  if (w.empty()) return out;
  auto eta = [&](std::size_t i) { return i < path.etas.size() ? path.etas[i] : 0.0; };
  out.waypoints.push_back(w[0]);
  out.etas.push_back(eta(0));
  if (!area.contains(w[0])) return out;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    double te = 0.0;
    double tx = 1.0;
    clip_segment(area, w[i], w[i + 1], te, tx);
    if (tx < 1.0) {
      out.waypoints.push_back(w[i] + (w[i + 1] - w[i]) * tx);
      out.etas.push_back(eta(i) + (eta(i + 1) - eta(i)) * tx);
      break;
    }
    out.waypoints.push_back(w[i + 1]);
    out.etas.push_back(eta(i + 1));
  }
  return out;
}

std::vector<Command> resolve_zone(const ConflictZone& zone, std::span<const RobotTrack> robots,
                                  const CoordinatorConfig& cfg, double now) {
  struct Candidate {
    double distance;
    const RobotTrack* track;
  };
  std::vector<Candidate> queue;
  const Point2 center = zone.bbox.center();
  for (const auto& r : robots) {
    if (zone.stop_area.contains(r.pose.position())) {
      queue.push_back({distance(r.pose.position(), center), &r});
    }
  }
  std::sort(queue.begin(), queue.end(), [](const Candidate& a, const Candidate& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.track->id < b.track->id;
  });

  // A robot whose in-zone path runs through a waiting robot cannot make
  // progress, so the waiting robot is moved ahead of it.
  std::vector<PlannedPath> locals;
  for (const auto& cand : queue) locals.push_back(clip_to_area(cand.track->path, zone.stop_area));
  const double reach = cfg.robot_diameter + cfg.block_margin;
  auto obstructed = [&](std::size_t i, const std::vector<bool>& done) {
    for (std::size_t j = 0; j < queue.size(); ++j) {
      if (j == i || done[j]) continue;
      const Point2 p = queue[j].track->pose.position();
      const auto& w = locals[i].waypoints;
      if (w.size() == 1 && distance(w.front(), p) < reach) return true;
      for (std::size_t k = 0; k + 1 < w.size(); ++k) {
        if (point_segment_distance(p, w[k], w[k + 1]) < reach) return true;
      }
    }
    return false;
  };
  std::vector<std::size_t> order;
  std::vector<bool> done(queue.size(), false);
  while (order.size() < queue.size()) {
    std::size_t pick = queue.size();
    for (std::size_t i = 0; i < queue.size() && pick == queue.size(); ++i) {
      if (!done[i] && !obstructed(i, done)) pick = i;
    }
    if (pick == queue.size()) {
      pick = static_cast<std::size_t>(std::find(done.begin(), done.end(), false) - done.begin());
    }
    done[pick] = true;
    order.push_back(pick);
  }

  std::vector<Command> out;
  std::vector<PlannedPath> cleared;
  for (const std::size_t idx : order) {
    const auto& cand = queue[idx];
    PlannedPath local = locals[idx];
    bool blocked = false;
    for (const auto& other : cleared) {
      if (paths_conflict(local, other, cfg.eta_threshold, cfg.robot_diameter)) {
        blocked = true;
        break;
      }
    }
    out.push_back({cand.track->id, blocked ? Verdict::stop : Verdict::proceed, zone.id, now});
    if (!blocked) cleared.push_back(std::move(local));
  }
  return out;
}

std::vector<Command> resolve_fcfs(const ConflictZone& zone, std::span<const Arrival> arrivals,
                                  double now) {
  std::vector<Arrival> queue(arrivals.begin(), arrivals.end());
  std::sort(queue.begin(), queue.end(), [](const Arrival& a, const Arrival& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.robot_id < b.robot_id;
  });
  std::vector<Command> out;
  if (queue.empty()) return out;
  const RobotId head = queue.front().robot_id;
  const bool clear = zone.occupants.empty() ||
                     (zone.occupants.size() == 1 && zone.occupants.contains(head));
  for (const auto& a : queue) {
    const bool go = a.robot_id == head && clear;
    out.push_back({a.robot_id, go ? Verdict::proceed : Verdict::stop, zone.id, now});
  }
  return out;
}

Coordinator::Coordinator(CoordinatorConfig cfg) : cfg_(cfg) {
  if (!(cfg_.stop_margin > 0.0)) throw InvalidConfig("stop margin must be positive");
  if (!(cfg_.nominal_speed > 0.0)) throw InvalidConfig("nominal speed must be positive");
  if (cfg_.eta_threshold < 0.0) throw InvalidConfig("ETA threshold must be non-negative");
}

int Coordinator::add_static_zone(const Box& bbox) {
  ConflictZone zone;
  zone.id = next_zone_id_++;
  zone.bbox = bbox;
  zone.stop_area = bbox.inflated(cfg_.stop_margin);
  zone.mode = ZoneMode::static_fcfs;
  zones_.push_back(zone);
  return zone.id;
}

void Coordinator::update_path(PlannedPath path) {
  const RobotId id = path.robot_id;
  paths_[id] = std::move(path);
}

void Coordinator::update_pose(const PoseReport& report) { poses_[report.id] = report; }

void Coordinator::remove_robot(RobotId id) {
  paths_.erase(id);
  poses_.erase(id);
}

std::vector<Command> Coordinator::tick(const Snapshot& snapshot, double now) {
  paths_.clear();
  poses_.clear();
  for (const auto& p : snapshot.paths) update_path(p);
  for (const auto& p : snapshot.poses) update_pose(p);
  return tick(now);
}

std::vector<Command> Coordinator::tick(double now) {
  for (const auto& [id, rep] : poses_) {
    if (now - rep.stamp > cfg_.staleness_bound) {
      throw StaleSnapshot("pose of robot " + std::to_string(id) + " is " +
                          std::to_string(now - rep.stamp) + " s old");
    }
  }

  tracks_.clear();
  for (const auto& [id, rep] : poses_) {
    const auto it = paths_.find(id);
    if (it == paths_.end() || it->second.waypoints.empty()) continue;
    PlannedPath rem;
    rem.robot_id = id;
    const Point2 here = rep.pose.position();
    rem.waypoints = remaining_path(it->second.waypoints, here);
    if (distance(here, rem.waypoints.front()) > 1e-9) {
      rem.waypoints.insert(rem.waypoints.begin(), here);
    }
    tracks_.push_back({id, rep.pose, annotate_etas(std::move(rem), cfg_.nominal_speed, now)});
  }

  std::vector<PlannedPath> remaining;
  remaining.reserve(tracks_.size());
  for (const auto& t : tracks_) remaining.push_back(t.path);
  const auto conflicts = detect_conflicts(remaining, cfg_.eta_threshold, cfg_.robot_diameter);
  const auto clusters = cluster_conflicts(conflicts);
  largest_cluster_ = 0;
  for (const auto& c : clusters) largest_cluster_ = std::max(largest_cluster_, c.members.size());
  update_dynamic_zones(clusters);

  std::map<RobotId, Command> merged;
  for (auto& zone : zones_) {
    std::vector<Command> cmds;
    if (zone.mode == ZoneMode::dynamic) {
      zone.occupants.clear();
      for (const auto& t : tracks_) {
        if (zone.members.contains(t.id) && zone.bbox.contains(t.pose.position())) {
          zone.occupants.insert(t.id);
        }
      }
      cmds = resolve_zone(zone, tracks_, cfg_, now);
    } else {
      cmds = resolve_static(zone, now);
    }
    for (const auto& c : cmds) {
      auto [it, inserted] = merged.emplace(c.robot_id, c);
      if (!inserted && it->second.verdict == Verdict::proceed && c.verdict == Verdict::stop) {
        it->second = c;
      }
    }
  }

  std::vector<Command> out;
  out.reserve(merged.size());
  for (auto& [id, c] : merged) out.push_back(c);
  return out;
}

void Coordinator::update_dynamic_zones(std::span<const ConflictCluster> clusters) {
  std::vector<ConflictZone> old;
  std::vector<ConflictZone> next;
  for (auto& z : zones_) (z.mode == ZoneMode::dynamic ? old : next).push_back(std::move(z));

  auto shares_member = [](const std::set<RobotId>& a, const std::set<RobotId>& b) {
    return std::any_of(a.begin(), a.end(), [&](RobotId id) { return b.contains(id); });
  };

  // Items 0..k-1 are this tick's clusters, k.. are the previous zones.
  const std::size_t k = clusters.size();
  std::vector<std::set<RobotId>> members(k + old.size());
  for (std::size_t i = 0; i < k; ++i) members[i].insert(clusters[i].members.begin(), clusters[i].members.end());
  for (std::size_t i = 0; i < old.size(); ++i) members[k + i] = old[i].members;
  DisjointSets sets(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      if (shares_member(members[i], members[j])) sets.unite(i, j);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> components;
  for (std::size_t i = 0; i < members.size(); ++i) components[sets.find(i)].push_back(i);

  std::vector<ConflictZone> dynamic;
  for (const auto& [root, items] : components) {
    std::vector<std::size_t> zone_items;
    for (std::size_t i : items) {
      if (i >= k) zone_items.push_back(i - k);
    }
    const bool has_cluster = items.front() < k;

    if (!has_cluster) {
      // Nothing detected this tick: the zone lives on while a member still heads into it.
      for (std::size_t z : zone_items) {
        const auto& zone = old[z];
        const bool live = std::any_of(tracks_.begin(), tracks_.end(), [&](const RobotTrack& t) {
          return zone.members.contains(t.id) && path_enters(t.path, zone.bbox);
        });
        if (live) dynamic.push_back(zone);
      }
      continue;
    }

    std::set<RobotId> all;
    for (std::size_t i : items) all.insert(members[i].begin(), members[i].end());
    if (zone_items.size() == 1 && old[zone_items.front()].members == all) {
      // Same robots as an existing zone: keep it and its geometry so priorities stay put.
      dynamic.push_back(old[zone_items.front()]);
      continue;
    }
    ConflictZone zone;
    zone.id = next_zone_id_++;
    zone.members = std::move(all);
    bool first = true;
    for (std::size_t i : items) {
      const Box b = i < k ? clusters[i].bbox : old[i - k].bbox;
      zone.bbox = first ? b : zone.bbox.united(b);
      first = false;
    }
    zone.stop_area = zone.bbox.inflated(cfg_.stop_margin);
    dynamic.push_back(std::move(zone));
  }

  // A robot waits in at most one queue: zones whose stop areas hold a common
  // robot are merged, repeating until no stop areas share a robot.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < dynamic.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < dynamic.size() && !changed; ++j) {
        const bool overlap = std::any_of(tracks_.begin(), tracks_.end(), [&](const RobotTrack& t) {
          const Point2 p = t.pose.position();
          return dynamic[i].stop_area.contains(p) && dynamic[j].stop_area.contains(p);
        });
        if (!overlap) continue;
        ConflictZone merged;
        merged.id = next_zone_id_++;
        merged.members = dynamic[i].members;
        merged.members.insert(dynamic[j].members.begin(), dynamic[j].members.end());
        merged.bbox = dynamic[i].bbox.united(dynamic[j].bbox);
        merged.stop_area = merged.bbox.inflated(cfg_.stop_margin);
        dynamic.erase(dynamic.begin() + static_cast<std::ptrdiff_t>(j));
        dynamic[i] = std::move(merged);
        changed = true;
      }
    }
  }

  for (auto& z : dynamic) next.push_back(std::move(z));
  std::sort(next.begin(), next.end(),
            [](const ConflictZone& a, const ConflictZone& b) { return a.id < b.id; });
  zones_ = std::move(next);
}

std::vector<Command> Coordinator::resolve_static(ConflictZone& zone, double now) {
  auto& arrivals = arrivals_[zone.id];
  auto& entered = entered_[zone.id];
  auto& passed = passed_[zone.id];

  for (auto it = arrivals.begin(); it != arrivals.end();) {
    if (!poses_.contains(it->first)) {
      entered.erase(it->first);
      it = arrivals.erase(it);
    } else {
      ++it;
    }
  }

  zone.occupants.clear();
  for (const auto& [id, rep] : poses_) {
    const Point2 p = rep.pose.position();
    const bool in_box = zone.bbox.contains(p);
    const bool in_stop = zone.stop_area.contains(p);
    if (in_box) zone.occupants.insert(id);
    if (!in_stop) passed.erase(id);

    if (arrivals.contains(id)) {
      if (in_box) {
        entered.insert(id);
      } else if (entered.contains(id) || !in_stop) {
        if (entered.contains(id)) passed.insert(id);
        arrivals.erase(id);
        entered.erase(id);
      }
    } else if (in_stop && !passed.contains(id)) {
      arrivals[id] = rep.stamp;
      if (in_box) entered.insert(id);
    }
  }

  std::vector<Arrival> list;
  for (const auto& [id, t] : arrivals) list.push_back({id, t});
  auto cmds = resolve_fcfs(zone, list, now);
  zone.fcfs_queue.clear();
  for (const auto& c : cmds) zone.fcfs_queue.push_back(c.robot_id);
  return cmds;
}

}  // namespace mrc
