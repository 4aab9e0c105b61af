#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "epicon/bounds.hpp"
#include "epicon/scheduler.hpp"

namespace epicon {

/// Invalid experiment or CLI configuration (exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or written (exit code 2).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Artifact { Trials, Histogram, Trajectory, Comparison, BoundsTable };

Artifact parse_artifact(std::string_view name);
const char* to_string(Artifact a) noexcept;

enum class Format { Csv, Json };

Format parse_format(std::string_view name);

struct ConfigTemplate {
  std::string label;
  TrialConfig config;  // seed is ignored; trial t uses seed_base + t
  std::uint64_t seed_base = 0;
};

struct ExperimentSpec {
  std::string name = "experiment";
  std::vector<ConfigTemplate> configs;
  std::size_t trials = 1;
  std::vector<Artifact> outputs{Artifact::Trials};
  /// Worker threads; 0 picks the hardware concurrency.
  std::size_t workers = 0;

  void validate() const;
  bool wants(Artifact a) const;
};

/// Parses the declarative sweep format: global `key = value` lines, then one
/// `[label]` section per configuration. `#` starts a comment.
ExperimentSpec parse_experiment_spec(std::istream& in);
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
};

Summary summarize(std::span<const double> xs);

struct Histogram {
  double lo = 0.0;
  double width = 1.0;
  std::vector<std::size_t> counts;
};

/// Equal-width bins over [min, max]; the top edge belongs to the last bin.
Histogram make_histogram(std::span<const double> xs, std::size_t bins = 30);

/// Mean census per big step across trials; shorter trials are padded with
/// their final record.
struct AveragedStep {
  double zeros = 0.0;
  double ones = 0.0;
  double empties = 0.0;
  double collisions = 0.0;
};

std::vector<AveragedStep> average_trajectories(std::span<const TrialResult> results);

struct BoundsRow {
  std::size_t n;
  std::size_t w0;
  std::size_t w1;
  ChainParams chain;
  std::optional<double> theorem2;
  std::optional<double> corollary1;
  std::optional<double> theorem3;
  std::optional<double> exact_decision;
};

BoundsRow bounds_row(std::size_t w0, std::size_t w1, std::size_t n);

struct ConfigReport {
  std::string label;
  TrialConfig config;
  std::uint64_t seed_base = 0;
  std::vector<TrialResult> results;
  Summary steps;
  double freq_zero = 0.0;
  double freq_one = 0.0;
  double freq_timeout = 0.0;
  std::size_t timeouts = 0;
  Histogram histogram;
  std::vector<AveragedStep> trajectory;
  RequirementReport requirements;
  BoundsRow bounds;
};

struct ExperimentReport {
  std::string name;
  std::vector<ConfigReport> configs;
};

/// Runs `trials` seeded trials of every configuration. Results are kept in
/// seed order regardless of the number of workers.
ExperimentReport run_experiment(const ExperimentSpec& spec);

/// Runs seeds seed_base .. seed_base + trials - 1 of one configuration.
std::vector<TrialResult> run_batch(const TrialConfig& config, std::uint64_t seed_base,
                                   std::size_t trials, std::size_t workers = 0);

ConfigReport summarize_batch(std::string label, const TrialConfig& config,
                             std::uint64_t seed_base, std::vector<TrialResult> results);

struct ComparisonRow {
  std::uint64_t seed;
  std::uint64_t basic_steps;
  std::uint64_t waiting_steps;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  double basic_mean = 0.0;
  double waiting_mean = 0.0;
  double mean_difference = 0.0;  // waiting - basic
  std::size_t waiting_faster = 0;
  std::size_t basic_faster = 0;
  std::size_t ties = 0;
  double sign_test_p = 1.0;  // two-sided exact binomial, ties dropped
};

/// Paired-seed comparison of the same population under two variants.
/// Throws ConfigError unless n, population, schedule and step cap match.
Comparison compare_variants(const TrialConfig& basic, const TrialConfig& waiting,
                            std::uint64_t seed_base, std::size_t trials,
                            std::size_t workers = 0);

/// Two-sided exact sign test.
double sign_test_p_value(std::size_t successes, std::size_t failures);

struct TrajectoryReport {
  std::vector<AveragedStep> mean;
  std::size_t early_phase_end = 0;  // number of big steps treated as early phase
  double early_correlation = 0.0;   // Pearson(zeros, collisions) over the early phase
  /// First big step after the fill where collisions < 0.1 zeros while zeros > 0.05 n.
  std::optional<std::size_t> low_collision_step;
};

/// Early phase: the big steps after the strand is first (on average) fully
/// written, up to the point where mean collisions have fallen to half of
/// their peak.
TrajectoryReport trajectory_experiment(const TrialConfig& config, std::uint64_t seed_base,
                                       std::size_t trials, std::size_t workers = 0);

double pearson(std::span<const double> x, std::span<const double> y);

struct SelfStabilizationReport {
  Value target;
  std::size_t trials = 0;
  std::size_t reached = 0;
  std::vector<TrialResult> results;  // decision = target when reached
  double reached_fraction() const noexcept {
    return trials == 0 ? 0.0 : static_cast<double>(reached) / static_cast<double>(trials);
  }
};

/// Runs from `initial` until consensus on the majority-writer mark (or the cap).
SelfStabilizationReport self_stabilization_experiment(const TrialConfig& config,
                                                      const Strand& initial,
                                                      std::uint64_t seed_base,
                                                      std::size_t trials,
                                                      std::size_t workers = 0);

struct OracleRow {
  std::size_t i;
  double absorption_prob;   // linear solve
  double closed_form_prob;  // lemma3_prob
  double absorption_time;   // linear solve, ties counted
  double closed_form_time;  // gambler_expected_time as printed
  bool time_discrepancy;    // relative gap above 1e-9
};

struct OracleTable {
  std::size_t n;
  std::size_t w0;
  std::size_t w1;
  ChainParams chain;
  std::vector<OracleRow> rows;
  double exact_decision;
};

/// Rows for every i, or only `start` when given. Requires w0 != w1 and w0, w1 > 0.
OracleTable oracle_table(std::size_t w0, std::size_t w1, std::size_t n,
                         std::optional<std::size_t> start = std::nullopt);

// CSV writers. Column layouts are fixed.
void write_trials_csv(std::ostream& out, std::span<const TrialResult> results);
void write_trajectory_csv(std::ostream& out, std::span<const StepMetrics> steps);
void write_trajectory_csv(std::ostream& out, std::span<const AveragedStep> steps);
void write_comparison_csv(std::ostream& out, const Comparison& cmp);
void write_histogram_csv(std::ostream& out, const Histogram& h);
void write_bounds_csv(std::ostream& out, std::span<const BoundsRow> rows);
void write_oracle_csv(std::ostream& out, const OracleTable& table);

void write_bounds_text(std::ostream& out, const BoundsRow& row);
void write_oracle_text(std::ostream& out, const OracleTable& table);

std::string report_json(const ExperimentReport& report, bool include_trials = true);

/// Writes the requested artifacts of every configuration into `dir`, named
/// `<label>_<artifact>.csv`, plus `<name>.json` when format is Json.
void write_artifacts(const ExperimentSpec& spec, const ExperimentReport& report,
                     const std::filesystem::path& dir, Format format);

}  // namespace epicon
