#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "mrc/errors.hpp"
#include "mrc/experiments.hpp"
#include "mrc/render.hpp"
#include "mrc/service.hpp"
#include "mrc/simulation.hpp"

namespace {

int cmd_sweep(const std::string& config, const std::string& out, int jobs, bool plots, bool quiet) {
  mrc::SweepConfig cfg = mrc::load_sweep_config(config);
  if (!out.empty()) cfg.out_dir = out;
  const auto started = std::chrono::steady_clock::now();
  mrc::ProgressFn progress;
  if (!quiet) {
    progress = [](std::size_t done, std::size_t total) {
      if (done == total || done % 10 == 0) std::fprintf(stderr, "\r%zu/%zu trials", done, total);
      if (done == total) std::fprintf(stderr, "\n");
    };
  }
  const mrc::SweepOutput result = mrc::run_sweep(cfg, jobs, progress);
  mrc::emit_outputs(result.rows, result.trials, cfg.out_dir, plots);

  std::printf("%-14s %3s %6s %17s %17s %17s %5s\n", "mode", "n", "trials", "success", "speed",
              "replans", "coll");
  for (const auto& r : result.rows) {
    std::printf("%-14s %3d %6d %8.3f +- %5.3f %8.2f +- %5.2f %8.2f +- %5.2f %5d\n",
                std::string(mrc::to_string(r.mode)).c_str(), r.n_robots, r.trials, r.success.mean,
                r.success.half_width, r.speed.mean, r.speed.half_width, r.replans.mean,
                r.replans.half_width, r.collisions_total);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::printf("%zu trials in %.1f s, outputs in %s\n", result.trials.size(), secs,
              cfg.out_dir.string().c_str());
  for (const auto& t : result.trials) {
    if (!t.result.error.empty()) {
      std::fprintf(stderr, "trial %s n=%d #%d failed: %s\n",
                   std::string(mrc::to_string(t.result.mode)).c_str(), t.result.n_robots, t.trial,
                   t.result.error.c_str());
    }
  }
  return result.complete() ? 0 : 1;
}

int cmd_run(const std::string& mode, int robots, std::uint64_t seed, const std::string& trace) {
  mrc::TrialConfig cfg;
  cfg.mode = mrc::parse_mode(mode);
  cfg.n_robots = robots;
  std::ofstream file;
  if (!trace.empty()) {
    file.open(trace, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + trace + " for writing");
  }
  const mrc::TrialResult r = mrc::run_trial(cfg, seed, trace.empty() ? nullptr : &file);
  if (!r.error.empty()) {
    std::fprintf(stderr, "trial failed: %s\n", r.error.c_str());
    return 1;
  }
  std::printf("mode %s  robots %d  seed %llu  sim_time %.1f s  wall %.0f ms\n",
              std::string(mrc::to_string(r.mode)).c_str(), r.n_robots,
              static_cast<unsigned long long>(r.seed), r.sim_time, r.wall_ms);
  std::printf("%5s %8s %8s %8s %8s %8s\n", "robot", "success", "time", "speed", "replans", "held");
  for (const auto& rr : r.robots) {
    std::printf("%5d %8s %8s %8.2f %8d %8d\n", rr.id, rr.success ? "yes" : "no",
                rr.time_to_goal ? std::to_string(*rr.time_to_goal).substr(0, 6).c_str() : "-",
                rr.avg_speed, rr.replans, rr.held_steps);
  }
  std::printf("success %.3f  speed %.2f  replans %d  collisions %d/%d  commands %d  largest cluster %d\n",
              r.success_rate(), r.mean_speed(), r.total_replans(), r.robot_collisions,
              r.obstacle_collisions, r.commands_issued, r.largest_cluster);
  return 0;
}

int cmd_replay(const std::string& trace_path, const std::string& svg_dir, std::size_t every) {
  std::ifstream in(trace_path);
  if (!in) throw std::runtime_error("cannot read " + trace_path);
  const mrc::Trace trace = mrc::read_trace(in);
  const std::size_t n = mrc::write_replay(trace, svg_dir, every);
  std::printf("%zu snapshots written to %s\n", n, svg_dir.c_str());
  return 0;
}

// Reads path/pose lines from stdin and prints commands every `period` seconds,
// stamped with the newest pose time received.
int cmd_serve(double period) {
  mrc::CoordinatorService service;
  std::atomic<bool> eof{false};
  std::thread reader([&] {
    std::string line;
    while (std::getline(std::cin, line)) {
      try {
        service.submit(line);
      } catch (const mrc::ProtocolError& e) {
        std::fprintf(stderr, "rejected: %s\n", e.what());
      }
    }
    eof = true;
  });
  auto tick = [&] {
    try {
      for (const auto& out : service.tick(service.latest_stamp())) std::cout << out << '\n';
      std::cout.flush();
    } catch (const mrc::StaleSnapshot& e) {
      std::fprintf(stderr, "skipped tick: %s\n", e.what());
    }
  };
  while (!eof) {
    std::this_thread::sleep_for(std::chrono::duration<double>(period));
    tick();
  }
  reader.join();
  tick();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-robot coordination simulator with a virtual traffic light coordinator"};
  app.require_subcommand(1);

  auto* sweep = app.add_subcommand("sweep", "Run a batch of trials and write CSV summaries");
  std::string config, out;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bool plots = false, quiet = false;
  sweep->add_option("--config", config, "Sweep config file (key = value)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out, "Output directory (overrides out_dir)");
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_flag("--plots", plots, "Also write success/speed/replans SVG plots");
  sweep->add_flag("--quiet", quiet, "No progress output");

  auto* run = app.add_subcommand("run", "Run a single trial");
  std::string mode = "hybrid", trace;
  int robots = 4;
  std::uint64_t seed = 1;
  run->add_option("--mode", mode, "hybrid or decentralized");
  run->add_option("--robots", robots, "Number of robots")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Trial seed");
  run->add_option("--trace", trace, "Write an NDJSON trace here");

  auto* replay = app.add_subcommand("replay", "Render a trace as SVG snapshots");
  std::string trace_in, svg_dir;
  std::size_t every = 10;
  replay->add_option("--trace", trace_in, "Trace file")->required()->check(CLI::ExistingFile);
  replay->add_option("--svg", svg_dir, "Output directory")->required();
  replay->add_option("--every", every, "Render every Nth step (the last step is always rendered)");

  auto* serve = app.add_subcommand("serve", "Coordinator over newline-delimited JSON on stdin/stdout");
  double period = 0.1;
  serve->add_option("--period", period, "Tick period in seconds")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep) return cmd_sweep(config, out, jobs, plots, quiet);
    if (*run) return cmd_run(mode, robots, seed, trace);
    if (*replay) return cmd_replay(trace_in, svg_dir, every);
    if (*serve) return cmd_serve(period);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
