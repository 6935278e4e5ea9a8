#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "mrc/experiments.hpp"
#include "mrc/simulation.hpp"

namespace fs = std::filesystem;
using namespace mrc;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %d %s: %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const AggregateRow& row(const SweepOutput& out, Mode mode, int n) {
  for (const auto& r : out.rows)
    if (r.mode == mode && r.n_robots == n) return r;
  throw std::runtime_error(fmt("no row for %s n=%d", std::string(to_string(mode)).c_str(), n));
}

void sweep_criteria(const SweepConfig& cfg, int jobs) {
  const auto started = std::chrono::steady_clock::now();
  const SweepOutput out = run_sweep(cfg, jobs);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::printf("sweep: %zu trials, base_seed %llu, %.1f s on %d worker(s)\n", out.trials.size(),
              static_cast<unsigned long long>(cfg.base_seed), secs, jobs);
  for (const auto& r : out.rows) {
    std::printf("  %-13s n=%2d success %.3f +- %.3f  replans %6.2f  collisions %d\n",
                std::string(to_string(r.mode)).c_str(), r.n_robots, r.success.mean, r.success.half_width,
                r.replans.mean, r.collisions_total);
  }
  if (!out.complete()) std::printf("  %d trial(s) could not run\n", out.failed_trials);

  const auto& h8 = row(out, Mode::hybrid, 8);
  const auto& d8 = row(out, Mode::decentralized, 8);
  const double gap = 100.0 * (h8.success.mean - d8.success.mean);
  report(1, out.complete() && gap >= 5.0,
         fmt("n=8 hybrid %.1f%% vs decentralized %.1f%%, gap %.1f pp (need >= 5)", 100 * h8.success.mean,
             100 * d8.success.mean, gap));

  double worst = 1.0;
  int worst_n = 0;
  for (int n = 2; n <= 8; ++n) {
    const double s = row(out, Mode::hybrid, n).success.mean;
    if (s < worst) worst = s, worst_n = n;
  }
  report(2, worst >= 0.85, fmt("lowest hybrid success for n in [2, 8] is %.1f%% at n=%d (need >= 85%%)",
                               100 * worst, worst_n));

  const double ratio = h8.replans.mean > 0 ? d8.replans.mean / h8.replans.mean : 1e9;
  report(3, d8.replans.mean >= 2.0 * h8.replans.mean,
         fmt("n=8 replans decentralized %.2f vs hybrid %.2f, ratio %.2f (need >= 2)", d8.replans.mean,
             h8.replans.mean, ratio));

  int obstacle = 0;
  for (const auto& t : out.trials) obstacle += t.result.obstacle_collisions;
  report(4, obstacle == 0, fmt("%d robot-obstacle collisions across the sweep (need 0)", obstacle));

  bool mono = true;
  std::string detail;
  for (Mode m : cfg.modes) {
    const double s2 = row(out, m, 2).success.mean, s10 = row(out, m, 10).success.mean;
    mono = mono && s10 <= s2;
    detail += fmt("%s n=10 %.3f vs n=2 %.3f; ", std::string(to_string(m)).c_str(), s10, s2);
  }
  report(5, mono, detail + "(need n=10 <= n=2)");
}

// Runs one doctest case in a test binary; true iff exactly that case ran and passed.
bool run_suite(const fs::path& binary, const std::string& pattern, double& secs) {
  const std::string cmd = "\"" + binary.string() + "\" --test-case=\"" + pattern + "\" --no-version 2>&1";
  const auto started = std::chrono::steady_clock::now();
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return false;
  std::string output;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) output += buf;
  const int status = pclose(pipe);
  secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  const bool one = std::regex_search(output, std::regex(R"(test cases:\s+1 \|\s+1 passed \|\s+0 failed)"));
  if (status != 0 || !one) std::printf("%s\n", output.c_str());
  return status == 0 && one;
}

void oracle_criterion(const fs::path& bin_dir) {
  struct Suite {
    const char* label;
    const char* binary;
    const char* pattern;
  };
  const Suite suites[] = {
      {"(a) A* vs Dijkstra", "test_global_planner", "A? grid cost equals Dijkstra on 200 random missions"},
      {"(b) clusters vs transitive closure", "test_coordinator", "clusters equal the brute-force transitive closure*"},
      {"(c) PROCEED sets vs brute force", "test_coordinator", "PROCEED sets are conflict-free*"},
      {"(d) rollout vs closed-form arc", "test_local_planner", "rollout endpoint matches the closed-form arc"},
  };
  bool all = true;
  std::string detail;
  for (const auto& s : suites) {
    double secs = 0;
    const bool ok = run_suite(bin_dir / s.binary, s.pattern, secs) && secs < 30.0;
    all = all && ok;
    detail += fmt("%s %s %.1f s; ", s.label, ok ? "ok" : "FAILED", secs);
  }
  report(6, all, detail + "(each must pass in < 30 s)");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream o;
  o << in.rdbuf();
  return o.str();
}

void determinism_criterion(const fs::path& bin_dir, const fs::path& config, const fs::path& scratch) {
  const fs::path a = scratch / "run_a", b = scratch / "run_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const fs::path exe = bin_dir / "mrcoord";
  auto sweep = [&](const fs::path& out, int jobs) {
    const std::string cmd = "\"" + exe.string() + "\" sweep --config \"" + config.string() + "\" --out \"" +
                            out.string() + "\" --jobs " + std::to_string(jobs) + " --quiet > /dev/null";
    return std::system(cmd.c_str()) == 0;
  };
  const bool ran = sweep(a, 1) && sweep(b, 2);
  bool same = ran && slurp(a / "trials.csv") == slurp(b / "trials.csv") && !slurp(a / "trials.csv").empty();
  std::size_t traces = 0;
  if (ran && fs::exists(a / "traces")) {
    for (const auto& e : fs::directory_iterator(a / "traces")) {
      ++traces;
      const fs::path other = b / "traces" / e.path().filename();
      same = same && fs::exists(other) && slurp(e.path()) == slurp(other);
    }
    std::size_t traces_b = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(b / "traces")) ++traces_b;
    same = same && traces_b == traces;
  }
  report(7, same && traces > 0,
         fmt("two sweeps of %s: trials.csv and %zu traces %s", config.filename().string().c_str(), traces,
             same ? "byte-identical" : "DIFFER"));
  fs::remove_all(a);
  fs::remove_all(b);
}

void scenario_criterion(std::uint64_t seed) {
  TrialConfig cfg;
  cfg.missions = {{{5, 25}, {45, 25}}, {{25, 5}, {25, 45}}};
  cfg.mode = Mode::hybrid;
  Simulation sim(cfg, seed);
  std::set<RobotId> held;
  while (!sim.finished()) {
    for (const auto& e : sim.step())
      if (e.kind == SimEventKind::held) held.insert(e.robot);
  }
  const auto h = sim.result();
  cfg.mode = Mode::decentralized;
  const auto d = run_trial(cfg, seed);
  const int collisions = h.robot_collisions + h.obstacle_collisions;
  const bool pass = held.size() == 1 && h.success_rate() == 1.0 && collisions == 0 && d.commands_issued == 0 &&
                    d.error.empty();
  report(8, pass,
         fmt("hybrid: %zu robot(s) held, success %.2f, %d collisions; decentralized: %d commands, success %.2f",
             held.size(), h.success_rate(), collisions, d.commands_issued, d.success_rate()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string sweep_config = MRC_SOURCE_DIR "/configs/full.conf";
  std::string determinism_config = MRC_SOURCE_DIR "/configs/smoke.conf";
  std::string bin_dir = MRC_BINARY_DIR;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::uint64_t scenario_seed = 1;
  app.add_option("--sweep-config", sweep_config, "Config for criteria 1-5");
  app.add_option("--determinism-config", determinism_config, "Config swept twice for criterion 7");
  app.add_option("--bin-dir", bin_dir, "Directory holding mrcoord and the test binaries");
  app.add_option("--jobs", jobs, "Worker threads for the sweep")->check(CLI::PositiveNumber);
  app.add_option("--scenario-seed", scenario_seed, "Seed for criterion 8");
  CLI11_PARSE(app, argc, argv);

  try {
    SweepConfig cfg = load_sweep_config(sweep_config);
    cfg.traces = false;
    sweep_criteria(cfg, jobs);
    oracle_criterion(bin_dir);
    determinism_criterion(bin_dir, determinism_config, fs::temp_directory_path() / "mrc_acceptance");
    scenario_criterion(scenario_seed);
  } catch (const std::exception& e) {
    std::printf("error: %s\n", e.what());
    return 2;
  }
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
