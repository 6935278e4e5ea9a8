#include "mrc/render.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include <json.hpp>

#include "mrc/errors.hpp"

namespace mrc {

namespace {

using nlohmann::json;

Point2 point(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

Box box(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(), j.at(3).get<double>()};
}

void read_paths(const json& arr, std::vector<std::vector<Point2>>& paths) {
  for (const auto& p : arr) {
    const auto id = p.at("robot").get<std::size_t>();
    if (id >= paths.size()) paths.resize(id + 1);
    paths[id].clear();
    for (const auto& w : p.at("waypoints")) paths[id].push_back(point(w));
  }
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b",
                          "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  std::vector<std::vector<Point2>> paths;
  bool have_header = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      if (!have_header) {
        if (j.value("type", "") != "header") throw ProtocolError("first record must be the header");
        trace.mode = j.at("mode").get<std::string>();
        trace.seed = j.at("seed").get<std::uint64_t>();
        trace.dt = j.at("dt").get<double>();
        const auto& w = j.at("world");
        trace.width = w.at("width").get<double>();
        trace.height = w.at("height").get<double>();
        for (const auto& p : w.at("pillars")) {
          trace.pillars.push_back({{p.at(0).get<double>(), p.at(1).get<double>()}, p.at(2).get<double>()});
        }
        for (const auto& r : j.at("robots")) {
          trace.radii.push_back(r.at("radius").get<double>());
          trace.starts.push_back(point(r.at("start")));
          trace.goals.push_back(point(r.at("goal")));
        }
        paths.resize(trace.radii.size());
        read_paths(j.at("paths"), paths);
        have_header = true;
        continue;
      }
      TraceFrame f;
      f.t = j.at("t").get<double>();
      for (const auto& r : j.at("robots")) {
        f.robots.push_back({r.at("id").get<RobotId>(),
                            Pose2(r.at("x").get<double>(), r.at("y").get<double>(),
                                  r.at("heading").get<double>()),
                            r.at("status").get<std::string>()});
      }
      for (const auto& z : j.at("zones")) {
        f.zones.push_back({z.at("id").get<int>(), box(z.at("bbox")), box(z.at("stop_area")),
                           z.at("occupied").get<bool>()});
      }
      for (const auto& c : j.at("cmds")) f.stops += c.at("verdict") == "STOP" ? 1 : 0;
      if (j.contains("paths")) read_paths(j.at("paths"), paths);
      f.paths = paths;
      trace.frames.push_back(std::move(f));
    } catch (const json::exception& e) {
      throw ProtocolError("trace line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ProtocolError& e) {
      throw ProtocolError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw ProtocolError("trace is empty");
  return trace;
}

std::string render_frame(const Trace& trace, std::size_t frame) {
  if (frame >= trace.frames.size()) throw std::out_of_range("frame index out of range");
  const TraceFrame& f = trace.frames[frame];
  constexpr double scale = 12.0;
  const double W = trace.width * scale;
  const double H = trace.height * scale;
  auto X = [&](double x) { return num(x * scale); };
  auto Y = [&](double y) { return num((trace.height - y) * scale); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(W) << "\" height=\"" << num(H + 24)
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"" << num(W) << "\" height=\"" << num(H) << "\" fill=\"white\" stroke=\"black\"/>\n";

  for (const auto& z : f.zones) {
    const char* color = z.occupied ? "#d62728" : "#2ca02c";
    const Box& s = z.stop_area;
    o << "<rect x=\"" << X(s.x0) << "\" y=\"" << Y(s.y1) << "\" width=\"" << num(s.width() * scale)
      << "\" height=\"" << num(s.height() * scale) << "\" fill=\"none\" stroke=\"" << color
      << "\" stroke-dasharray=\"6,4\"/>\n";
    const Box& b = z.bbox;
    o << "<rect x=\"" << X(b.x0) << "\" y=\"" << Y(b.y1) << "\" width=\"" << num(b.width() * scale)
      << "\" height=\"" << num(b.height() * scale) << "\" fill=\"" << color
      << "\" fill-opacity=\"0.25\" stroke=\"" << color << "\"/>\n";
  }

  for (const auto& p : trace.pillars) {
    o << "<circle cx=\"" << X(p.center.x) << "\" cy=\"" << Y(p.center.y) << "\" r=\""
      << num(p.radius * scale) << "\" fill=\"black\"/>\n";
  }

  for (std::size_t id = 0; id < f.paths.size(); ++id) {
    if (f.paths[id].size() < 2) continue;
    o << "<polyline fill=\"none\" stroke=\"" << kPalette[id % 10]
      << "\" stroke-dasharray=\"2,4\" stroke-width=\"2\" points=\"";
    for (const auto& w : f.paths[id]) o << X(w.x) << ',' << Y(w.y) << ' ';
    o << "\"/>\n";
  }

  for (std::size_t id = 0; id < trace.radii.size(); ++id) {
    o << "<polyline fill=\"none\" stroke=\"" << kPalette[id % 10] << "\" stroke-width=\"1.5\" points=\""
      << X(trace.starts[id].x) << ',' << Y(trace.starts[id].y) << ' ';
    for (std::size_t k = 0; k <= frame; ++k) {
      for (const auto& r : trace.frames[k].robots) {
        if (static_cast<std::size_t>(r.id) == id) o << X(r.pose.x) << ',' << Y(r.pose.y) << ' ';
      }
    }
    o << "\"/>\n";
    const Point2 g = trace.goals[id];
    o << "<path d=\"M" << X(g.x - 0.8) << ' ' << Y(g.y - 0.8) << " L" << X(g.x + 0.8) << ' '
      << Y(g.y + 0.8) << " M" << X(g.x - 0.8) << ' ' << Y(g.y + 0.8) << " L" << X(g.x + 0.8) << ' '
      << Y(g.y - 0.8) << "\" stroke=\"" << kPalette[id % 10] << "\" stroke-width=\"2\"/>\n";
  }

  for (const auto& r : f.robots) {
    const auto id = static_cast<std::size_t>(r.id);
    const double radius = id < trace.radii.size() ? trace.radii[id] : 1.0;
    const bool held = r.status == "HELD";
    o << "<circle cx=\"" << X(r.pose.x) << "\" cy=\"" << Y(r.pose.y) << "\" r=\"" << num(radius * scale)
      << "\" fill=\"" << kPalette[id % 10] << "\" fill-opacity=\"0.6\" stroke=\""
      << (held ? "#d62728" : "black") << "\" stroke-width=\"" << (held ? 3 : 1) << "\"/>\n";
    const Point2 tip = r.pose.position() + Point2{std::cos(r.pose.heading), std::sin(r.pose.heading)} * radius;
    o << "<line x1=\"" << X(r.pose.x) << "\" y1=\"" << Y(r.pose.y) << "\" x2=\"" << X(tip.x)
      << "\" y2=\"" << Y(tip.y) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << X(r.pose.x) << "\" y=\"" << Y(r.pose.y) << "\" dy=\"4\" text-anchor=\"middle\">"
      << r.id << "</text>\n";
  }

  o << "<text x=\"4\" y=\"" << num(H + 17) << "\">" << trace.mode << "  seed " << trace.seed
    << "  t = " << num(f.t) << " s  zones " << f.zones.size() << "  STOP " << f.stops << "</text>\n";
  o << "</svg>\n";
  return o.str();
}

std::size_t write_replay(const Trace& trace, const std::filesystem::path& dir, std::size_t stride) {
  if (stride == 0) stride = 1;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  std::size_t written = 0;
  const std::size_t n = trace.frames.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (k % stride != 0 && k + 1 != n) continue;
    char name[32];
    std::snprintf(name, sizeof name, "step_%05zu.svg", k);
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << render_frame(trace, k);
    if (!out) throw std::runtime_error("failed writing " + path.string());
    ++written;
  }
  return written;
}

}  // namespace mrc
