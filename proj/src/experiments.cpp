#include "mrc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "mrc/errors.hpp"
#include "mrc/random.hpp"

namespace mrc {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw InvalidConfig("invalid number '" + std::string(text) + "'");
  }
  return value;
}

bool parse_bool(std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw InvalidConfig("invalid boolean '" + std::string(text) + "'");
}

// "1-10" or "2, 4, 8" or a mix of both.
std::vector<int> parse_counts(std::string_view text) {
  std::vector<int> out;
  for (auto item : split(text, ',')) {
    const auto dash = item.find('-', 1);
    if (dash == std::string_view::npos) {
      out.push_back(parse_number<int>(item));
      continue;
    }
    const int lo = parse_number<int>(trim(item.substr(0, dash)));
    const int hi = parse_number<int>(trim(item.substr(dash + 1)));
    if (hi < lo) throw InvalidConfig("empty range '" + std::string(item) + "'");
    for (int n = lo; n <= hi; ++n) out.push_back(n);
  }
  return out;
}

using Setter = std::function<void(SweepConfig&, std::string_view)>;

template <typename T>
Setter set(T SimConfig::*group, double T::*field) {
  return [=](SweepConfig& c, std::string_view v) { (c.sim.*group).*field = parse_number<double>(v); };
}

Setter set(double SimConfig::*field) {
  return [=](SweepConfig& c, std::string_view v) { c.sim.*field = parse_number<double>(v); };
}

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"modes",
       [](SweepConfig& c, std::string_view v) {
         c.modes.clear();
         for (auto m : split(v, ',')) c.modes.push_back(parse_mode(m));
       }},
      {"robot_counts", [](SweepConfig& c, std::string_view v) { c.robot_counts = parse_counts(v); }},
      {"trials_per_cell",
       [](SweepConfig& c, std::string_view v) { c.trials_per_cell = parse_number<int>(v); }},
      {"base_seed",
       [](SweepConfig& c, std::string_view v) { c.base_seed = parse_number<std::uint64_t>(v); }},
      {"out_dir", [](SweepConfig& c, std::string_view v) { c.out_dir = std::string(v); }},
      {"traces", [](SweepConfig& c, std::string_view v) { c.traces = parse_bool(v); }},
      {"world.width", set(&SimConfig::world, &WorldConfig::width)},
      {"world.height", set(&SimConfig::world, &WorldConfig::height)},
      {"world.pillar_rows",
       [](SweepConfig& c, std::string_view v) { c.sim.world.pillar_rows = parse_number<int>(v); }},
      {"world.pillar_cols",
       [](SweepConfig& c, std::string_view v) { c.sim.world.pillar_cols = parse_number<int>(v); }},
      {"world.pillar_radius", set(&SimConfig::world, &WorldConfig::pillar_radius)},
      {"world.grid_resolution", set(&SimConfig::world, &WorldConfig::grid_resolution)},
      {"robot_radius", set(&SimConfig::robot_radius)},
      {"dt", set(&SimConfig::dt)},
      {"timeout", set(&SimConfig::timeout)},
      {"goal_tolerance", set(&SimConfig::goal_tolerance)},
      {"stuck_threshold", set(&SimConfig::stuck_threshold)},
      {"patience_min", set(&SimConfig::patience_min)},
      {"patience_max", set(&SimConfig::patience_max)},
      {"eta_speed_fraction", set(&SimConfig::eta_speed_fraction)},
      {"planner.clearance_margin", set(&SimConfig::planner, &PlannerOptions::clearance_margin)},
      {"missions.min_separation_fraction",
       set(&SimConfig::missions, &MissionOptions::min_separation_fraction)},
      {"missions.clearance_margin", set(&SimConfig::missions, &MissionOptions::clearance_margin)},
      {"coordinator.eta_threshold", set(&SimConfig::coordinator, &CoordinatorConfig::eta_threshold)},
      {"coordinator.stop_margin", set(&SimConfig::coordinator, &CoordinatorConfig::stop_margin)},
      {"coordinator.block_margin", set(&SimConfig::coordinator, &CoordinatorConfig::block_margin)},
      {"dwa.v_max", [](SweepConfig& c, std::string_view v) { c.sim.dwa.limits.v_max = parse_number<double>(v); }},
      {"dwa.w_max", [](SweepConfig& c, std::string_view v) { c.sim.dwa.limits.w_max = parse_number<double>(v); }},
      {"dwa.a_lin", [](SweepConfig& c, std::string_view v) { c.sim.dwa.limits.a_lin = parse_number<double>(v); }},
      {"dwa.a_ang", [](SweepConfig& c, std::string_view v) { c.sim.dwa.limits.a_ang = parse_number<double>(v); }},
      {"dwa.horizon", set(&SimConfig::dwa, &DwaConfig::horizon)},
      {"dwa.v_samples",
       [](SweepConfig& c, std::string_view v) { c.sim.dwa.v_samples = parse_number<int>(v); }},
      {"dwa.w_samples",
       [](SweepConfig& c, std::string_view v) { c.sim.dwa.w_samples = parse_number<int>(v); }},
      {"dwa.w_heading", set(&SimConfig::dwa, &DwaConfig::w_heading)},
      {"dwa.w_clear", set(&SimConfig::dwa, &DwaConfig::w_clear)},
      {"dwa.w_vel", set(&SimConfig::dwa, &DwaConfig::w_vel)},
      {"dwa.lookahead", set(&SimConfig::dwa, &DwaConfig::lookahead)},
      {"dwa.safety_margin", set(&SimConfig::dwa, &DwaConfig::safety_margin)},
      {"lidar.rays", [](SweepConfig& c, std::string_view v) { c.sim.lidar.rays = parse_number<int>(v); }},
      {"lidar.span_deg",
       [](SweepConfig& c, std::string_view v) {
         c.sim.lidar.span = parse_number<double>(v) * std::numbers::pi / 180.0;
       }},
      {"lidar.max_range", set(&SimConfig::lidar, &LidarConfig::max_range)},
  };
  return table;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out + "\"";
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  return out;
}

constexpr const char* kTrialsHeader =
    "mode,n_robots,trial,seed,success_rate,avg_speed,replans,robot_collisions,"
    "obstacle_collisions,commands,largest_cluster,sim_time,error";

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

struct Series {
  std::string name;
  std::string color;
  std::vector<double> x;
  std::vector<Interval> y;
};

std::string svg_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string line_plot(const std::string& title, const std::string& y_label,
                      const std::vector<Series>& series) {
  constexpr double W = 640, H = 420, L = 70, R = 150, T = 40, B = 55;
  double x0 = 1e300, x1 = -1e300, y0 = 0.0, y1 = -1e300;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i].mean - s.y[i].half_width);
      y1 = std::max(y1, s.y[i].mean + s.y[i].half_width);
    }
  }
  if (x1 <= x0) x1 = x0 + 1.0;
  if (y1 <= y0) y1 = y0 + 1.0;
  y1 += 0.05 * (y1 - y0);
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title
    << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double v = y0 + (y1 - y0) * k / 5.0;
    o << "<line x1=\"" << L - 4 << "\" y1=\"" << svg_number(py(v)) << "\" x2=\"" << W - R
      << "\" y2=\"" << svg_number(py(v)) << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << L - 8 << "\" y=\"" << svg_number(py(v) + 4) << "\" text-anchor=\"end\">"
      << svg_number(v) << "</text>\n";
  }
  for (double x = std::ceil(x0); x <= x1 + 1e-9; x += 1.0) {
    o << "<text x=\"" << svg_number(px(x)) << "\" y=\"" << H - B + 18
      << "\" text-anchor=\"middle\">" << x << "</text>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15
    << "\" text-anchor=\"middle\">number of robots</text>\n";
  o << "<text transform=\"translate(18," << (T + H - B) / 2
    << ") rotate(-90)\" text-anchor=\"middle\">" << y_label << "</text>\n";

  int legend = 0;
  for (const auto& s : series) {
    if (s.x.empty()) continue;
    std::string band, line;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      band += svg_number(px(s.x[i])) + "," + svg_number(py(s.y[i].mean + s.y[i].half_width)) + " ";
      line += svg_number(px(s.x[i])) + "," + svg_number(py(s.y[i].mean)) + " ";
    }
    for (std::size_t i = s.x.size(); i-- > 0;) {
      band += svg_number(px(s.x[i])) + "," + svg_number(py(s.y[i].mean - s.y[i].half_width)) + " ";
    }
    o << "<polygon points=\"" << band << "\" fill=\"" << s.color
      << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    o << "<polyline points=\"" << line << "\" fill=\"none\" stroke=\"" << s.color
      << "\" stroke-width=\"2\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      o << "<circle cx=\"" << svg_number(px(s.x[i])) << "\" cy=\"" << svg_number(py(s.y[i].mean))
        << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
    }
    const double ly = T + 10 + 20 * legend++;
    o << "<line x1=\"" << W - R + 15 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 40 << "\" y2=\""
      << ly << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << W - R + 46 << "\" y=\"" << ly + 4 << "\">" << s.name << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace

void SweepConfig::validate() const {
  if (modes.empty()) throw InvalidConfig("modes must not be empty");
  if (robot_counts.empty()) throw InvalidConfig("robot_counts must not be empty");
  for (int n : robot_counts) {
    if (n < 1) throw InvalidConfig("robot counts must be >= 1");
  }
  if (trials_per_cell < 1) throw InvalidConfig("trials_per_cell must be >= 1");
  sim.validate();
}

SweepConfig parse_sweep_config(std::istream& in) {
  SweepConfig cfg;
  std::map<std::string, const Setter*> lookup;
  for (const auto& [key, fn] : setters()) lookup[key] = &fn;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidConfig("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    const auto it = lookup.find(key);
    if (it == lookup.end()) {
      throw InvalidConfig("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    try {
      (*it->second)(cfg, value);
    } catch (const InvalidConfig& e) {
      throw InvalidConfig("line " + std::to_string(line_no) + ": " + key + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot read config " + path.string());
  try {
    return parse_sweep_config(in);
  } catch (const InvalidConfig& e) {
    throw InvalidConfig(path.string() + ": " + e.what());
  }
}

std::vector<std::string> sweep_config_keys() {
  std::vector<std::string> out;
  for (const auto& [key, fn] : setters()) out.push_back(key);
  return out;
}

std::uint64_t trial_seed(std::uint64_t base_seed, Mode mode, int n_robots, int trial) {
  std::uint64_t h = mix_seed(base_seed, static_cast<std::uint64_t>(mode));
  h = mix_seed(h, static_cast<std::uint64_t>(n_robots));
  return mix_seed(h, static_cast<std::uint64_t>(trial));
}

Interval mean_ci(std::span<const double> values) {
  if (values.empty()) throw EmptyCell("no values to aggregate");
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean, 1.96 * sd / std::sqrt(n)};
}

TrialSummary summarize(const SweepTrial& t) {
  const auto& r = t.result;
  return {r.mode,
          r.n_robots,
          t.trial,
          r.seed,
          r.success_rate(),
          r.mean_speed(),
          r.total_replans(),
          r.robot_collisions,
          r.obstacle_collisions,
          r.commands_issued,
          r.largest_cluster,
          r.sim_time,
          r.error};
}

AggregateRow aggregate(std::span<const TrialSummary> results) {
  if (results.empty()) throw EmptyCell("cell has no results");
  AggregateRow row;
  row.mode = results.front().mode;
  row.n_robots = results.front().n_robots;
  std::vector<double> success, speed, replans;
  for (const auto& r : results) {
    if (r.mode != row.mode || r.n_robots != row.n_robots) {
      throw std::invalid_argument("results span more than one cell");
    }
    success.push_back(r.success_rate);
    speed.push_back(r.avg_speed);
    replans.push_back(static_cast<double>(r.replans));
    row.collisions_total += r.robot_collisions + r.obstacle_collisions;
  }
  row.trials = static_cast<int>(results.size());
  row.success = mean_ci(success);
  row.speed = mean_ci(speed);
  row.replans = mean_ci(replans);
  return row;
}

AggregateRow aggregate(std::span<const TrialResult> results) {
  std::vector<TrialSummary> s;
  for (const auto& r : results) s.push_back(summarize({0, r}));
  return aggregate(s);
}

std::vector<AggregateRow> aggregate_trials(std::span<const TrialSummary> trials) {
  std::vector<AggregateRow> rows;
  std::size_t i = 0;
  while (i < trials.size()) {
    const Mode mode = trials[i].mode;
    const int n = trials[i].n_robots;
    std::vector<TrialSummary> cell;
    for (; i < trials.size() && trials[i].mode == mode && trials[i].n_robots == n; ++i) {
      if (trials[i].error.empty()) cell.push_back(trials[i]);
    }
    if (!cell.empty()) rows.push_back(aggregate(cell));
  }
  return rows;
}

std::filesystem::path trace_path(const std::filesystem::path& out_dir, Mode mode, int n_robots,
                                 int trial) {
  char name[64];
  std::snprintf(name, sizeof name, "%s_n%02d_t%03d.ndjson", std::string(to_string(mode)).c_str(),
                n_robots, trial);
  return out_dir / "traces" / name;
}

SweepOutput run_sweep(const SweepConfig& cfg, int jobs, const ProgressFn& progress) {
  cfg.validate();
  struct Task {
    Mode mode;
    int n;
    int trial;
  };
  std::vector<Task> tasks;
  for (Mode m : cfg.modes) {
    for (int n : cfg.robot_counts) {
      for (int i = 0; i < cfg.trials_per_cell; ++i) tasks.push_back({m, n, i});
    }
  }
  if (cfg.traces) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir / "traces", ec);
    if (ec) throw std::runtime_error("cannot create " + (cfg.out_dir / "traces").string() + ": " + ec.message());
  }

  SweepOutput out;
  out.trials.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= tasks.size()) return;
      const Task& t = tasks[k];
      try {
        TrialConfig tc;
        tc.mode = t.mode;
        tc.n_robots = t.n;
        tc.sim = cfg.sim;
        const auto seed = trial_seed(cfg.base_seed, t.mode, t.n, t.trial);
        if (cfg.traces) {
          const auto path = trace_path(cfg.out_dir, t.mode, t.n, t.trial);
          auto file = open_output(path);
          out.trials[k] = {t.trial, run_trial(tc, seed, &file)};
          finish(file, path);
        } else {
          out.trials[k] = {t.trial, run_trial(tc, seed)};
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(tasks.size());
        return;
      }
      const std::size_t d = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(d, tasks.size());
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  for (const auto& t : out.trials) out.failed_trials += t.result.error.empty() ? 0 : 1;
  std::vector<TrialSummary> summaries;
  for (const auto& t : out.trials) summaries.push_back(summarize(t));
  out.rows = aggregate_trials(summaries);
  return out;
}

void write_summary_csv(std::ostream& out, std::span<const AggregateRow> rows) {
  out << "mode,n_robots,trials,success_mean,success_ci,speed_mean,speed_ci,replans_mean,"
         "replans_ci,collisions_total\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%d\n",
                  std::string(to_string(r.mode)).c_str(), r.n_robots, r.trials, r.success.mean,
                  r.success.half_width, r.speed.mean, r.speed.half_width, r.replans.mean,
                  r.replans.half_width, r.collisions_total);
    out << buf;
  }
}

void write_trials_csv(std::ostream& out, std::span<const TrialSummary> trials) {
  out << kTrialsHeader << '\n';
  for (const auto& t : trials) {
    out << to_string(t.mode) << ',' << t.n_robots << ',' << t.trial << ',' << t.seed << ','
        << format_double(t.success_rate) << ',' << format_double(t.avg_speed) << ',' << t.replans
        << ',' << t.robot_collisions << ',' << t.obstacle_collisions << ',' << t.commands << ','
        << t.largest_cluster << ',' << format_double(t.sim_time) << ',' << csv_field(t.error)
        << '\n';
  }
}

void write_trials_csv(std::ostream& out, std::span<const SweepTrial> trials) {
  std::vector<TrialSummary> s;
  for (const auto& t : trials) s.push_back(summarize(t));
  write_trials_csv(out, s);
}

std::vector<TrialSummary> read_trials_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kTrialsHeader) {
    throw InvalidConfig("trials.csv: unexpected header");
  }
  std::vector<TrialSummary> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = csv_split(line);
    if (f.size() != 13) {
      throw InvalidConfig("trials.csv line " + std::to_string(line_no) + ": expected 13 fields");
    }
    try {
      TrialSummary t;
      t.mode = parse_mode(f[0]);
      t.n_robots = parse_number<int>(f[1]);
      t.trial = parse_number<int>(f[2]);
      t.seed = parse_number<std::uint64_t>(f[3]);
      t.success_rate = parse_number<double>(f[4]);
      t.avg_speed = parse_number<double>(f[5]);
      t.replans = parse_number<int>(f[6]);
      t.robot_collisions = parse_number<int>(f[7]);
      t.obstacle_collisions = parse_number<int>(f[8]);
      t.commands = parse_number<int>(f[9]);
      t.largest_cluster = parse_number<int>(f[10]);
      t.sim_time = parse_number<double>(f[11]);
      t.error = f[12];
      out.push_back(std::move(t));
    } catch (const InvalidConfig& e) {
      throw InvalidConfig("trials.csv line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void emit_outputs(std::span<const AggregateRow> rows, std::span<const SweepTrial> trials,
                  const std::filesystem::path& out_dir, bool plots) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

  const auto summary = out_dir / "summary.csv";
  auto s = open_output(summary);
  write_summary_csv(s, rows);
  finish(s, summary);

  const auto trials_path = out_dir / "trials.csv";
  auto t = open_output(trials_path);
  write_trials_csv(t, trials);
  finish(t, trials_path);

  if (!plots) return;
  struct Plot {
    const char* file;
    const char* title;
    const char* label;
    Interval AggregateRow::*metric;
  };
  const Plot specs[] = {
      {"success.svg", "Success rate", "fraction of robots at goal", &AggregateRow::success},
      {"speed.svg", "Average speed", "(distance / step) x 100", &AggregateRow::speed},
      {"replans.svg", "Global path replans", "replans per trial", &AggregateRow::replans},
  };
  for (const auto& p : specs) {
    std::vector<Series> series;
    for (const auto& r : rows) {
      const std::string name(to_string(r.mode));
      auto it = std::find_if(series.begin(), series.end(), [&](const Series& x) { return x.name == name; });
      if (it == series.end()) {
        series.push_back({name, r.mode == Mode::hybrid ? "#1f77b4" : "#d62728", {}, {}});
        it = series.end() - 1;
      }
      it->x.push_back(r.n_robots);
      it->y.push_back(r.*p.metric);
    }
    const auto path = out_dir / p.file;
    auto f = open_output(path);
    f << line_plot(p.title, p.label, series);
    finish(f, path);
  }
}

}  // namespace mrc
