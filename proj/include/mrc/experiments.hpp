#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mrc/simulation.hpp"

namespace mrc {

struct SweepConfig {
  std::vector<Mode> modes{Mode::hybrid, Mode::decentralized};
  std::vector<int> robot_counts{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  int trials_per_cell = 50;
  std::uint64_t base_seed = 1;
  SimConfig sim;
  std::filesystem::path out_dir = "results";
  /// Write one NDJSON trace per trial under out_dir/traces.
  bool traces = false;

  /// Throws InvalidConfig.
  void validate() const;
};

/// Flat `key = value` text; '#' starts a comment. Unknown keys are errors.
/// Throws InvalidConfig with the offending line number.
SweepConfig parse_sweep_config(std::istream& in);
SweepConfig load_sweep_config(const std::filesystem::path& path);

/// Names accepted by the config parser, in documentation order.
std::vector<std::string> sweep_config_keys();

std::uint64_t trial_seed(std::uint64_t base_seed, Mode mode, int n_robots, int trial);

struct SweepTrial {
  int trial = 0;
  TrialResult result;
};

/// One trials.csv row: the per-trial numbers aggregation needs.
struct TrialSummary {
  Mode mode = Mode::hybrid;
  int n_robots = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double success_rate = 0.0;
  double avg_speed = 0.0;
  int replans = 0;
  int robot_collisions = 0;
  int obstacle_collisions = 0;
  int commands = 0;
  int largest_cluster = 0;
  double sim_time = 0.0;
  std::string error;
};

TrialSummary summarize(const SweepTrial& t);

struct Interval {
  double mean = 0.0;
  double half_width = 0.0;
};

/// Mean and 1.96 * s / sqrt(n); half-width 0 for a single value. Throws EmptyCell.
Interval mean_ci(std::span<const double> values);

struct AggregateRow {
  Mode mode = Mode::hybrid;
  int n_robots = 0;
  int trials = 0;
  Interval success;
  Interval speed;
  Interval replans;
  int collisions_total = 0;
};

/// Completed trials of one (mode, n) cell. Throws EmptyCell.
AggregateRow aggregate(std::span<const TrialSummary> results);
AggregateRow aggregate(std::span<const TrialResult> results);

struct SweepOutput {
  /// Canonical order: config mode order, then robot count, then trial index.
  std::vector<SweepTrial> trials;
  std::vector<AggregateRow> rows;
  /// Trials that could not run; their cell is incomplete.
  int failed_trials = 0;

  bool complete() const { return failed_trials == 0; }
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Runs every trial on `jobs` worker threads. Results do not depend on `jobs`.
SweepOutput run_sweep(const SweepConfig& cfg, int jobs = 1, const ProgressFn& progress = {});

/// Rows for every cell with at least one completed trial, in trial order.
std::vector<AggregateRow> aggregate_trials(std::span<const TrialSummary> trials);

void write_summary_csv(std::ostream& out, std::span<const AggregateRow> rows);
void write_trials_csv(std::ostream& out, std::span<const SweepTrial> trials);
void write_trials_csv(std::ostream& out, std::span<const TrialSummary> trials);
/// Throws InvalidConfig on malformed input.
std::vector<TrialSummary> read_trials_csv(std::istream& in);

std::filesystem::path trace_path(const std::filesystem::path& out_dir, Mode mode, int n_robots,
                                 int trial);

/// Writes summary.csv, trials.csv and, with `plots`, success/speed/replans SVGs.
/// Throws std::runtime_error naming the path on I/O failure.
void emit_outputs(std::span<const AggregateRow> rows, std::span<const SweepTrial> trials,
                  const std::filesystem::path& out_dir, bool plots);

}  // namespace mrc
