#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "epicon/agents.hpp"
#include "epicon/rng.hpp"
#include "epicon/strand.hpp"

namespace epicon {

/// How agent steps are interleaved in time.
///
/// Asynchronous: every agent's steps take independent Uniform(0, 1] time, and
/// big step k covers the interval (k-1, k]. Every agent therefore takes at
/// least one step per big step, in time order.
///
/// Rounds: every agent takes exactly one step per big step in a fresh random
/// permutation. Agents then move in lock-step, so arrivals at a cell repeat
/// with period 2n-2 and boundary erase/refill sequences can cycle for a very
/// long time.
enum class Schedule : std::uint8_t { Asynchronous, Rounds };

const char* to_string(Schedule s) noexcept;
Schedule parse_schedule(std::string_view name);

struct TrialConfig {
  std::size_t n = 1000;
  Population pop{40, 50};
  Variant variant = Variant::basic();
  std::uint64_t seed = 0;
  std::uint64_t max_big_steps = 0;  // 0 selects default_max_big_steps(n)
  bool record_trajectory = false;
  Schedule schedule = Schedule::Asynchronous;

  void validate() const;
  std::uint64_t step_cap() const noexcept;
};

/// 100 n^2 big steps.
std::uint64_t default_max_big_steps(std::size_t n) noexcept;

enum class Decision : std::uint8_t { Zero, One, Timeout };

const char* to_string(Decision d) noexcept;
inline Decision decision_of(Value v) noexcept {
  return v == Value::Zero ? Decision::Zero : Decision::One;
}

/// Census and collision count after a big step.
struct StepMetrics {
  std::size_t zeros = 0;
  std::size_t ones = 0;
  std::size_t empties = 0;
  std::size_t collisions = 0;

  friend bool operator==(const StepMetrics&, const StepMetrics&) = default;
};

StepMetrics measure(const Strand& s) noexcept;

struct TrialResult {
  std::uint64_t seed = 0;
  Decision decision = Decision::Timeout;
  std::uint64_t big_steps = 0;
  std::vector<StepMetrics> trajectory;  // one record per big step when recorded

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

/// Running totals of what the agents did.
struct EventCounts {
  std::uint64_t writes = 0;
  std::uint64_t erases = 0;
  std::uint64_t forced_erases = 0;
  std::optional<std::uint64_t> first_erase_step;  // big step (1-based) of the first erase
};

/// One trial in progress. See Schedule for what a big step is.
class Trial {
 public:
  explicit Trial(const TrialConfig& config);
  /// Starts from an arbitrary strand instead of the all-empty one.
  Trial(const TrialConfig& config, Strand initial);

  StepMetrics big_step();

  /// Runs until consensus (any value) or the step cap.
  TrialResult run();
  /// Runs until the strand reaches consensus on `target` or the step cap.
  TrialResult run_until(Value target);

  const Strand& strand() const noexcept { return strand_; }
  Strand& strand() noexcept { return strand_; }
  const std::vector<Agent>& agents() const noexcept { return agents_; }
  std::vector<Agent>& agents() noexcept { return agents_; }
  std::uint64_t steps_taken() const noexcept { return steps_; }
  const EventCounts& events() const noexcept { return events_; }
  const TrialConfig& config() const noexcept { return config_; }

 private:
  void round();
  void record(StepOutcome outcome);
  static double step_duration(Rng& rng);
  // Heap order for the asynchronous schedule: earliest next step on top.
  auto later_than() const {
    return [this](std::size_t a, std::size_t b) {
      return next_time_[a] != next_time_[b] ? next_time_[a] > next_time_[b] : a > b;
    };
  }
  template <typename Done>
  TrialResult drive(Done done);

  TrialConfig config_;
  Strand strand_;
  std::vector<Agent> agents_;
  std::vector<std::size_t> order_;
  std::vector<double> next_time_;  // Asynchronous: min-heap over (time, agent) in order_
  Rng schedule_rng_;
  Rng variant_rng_;
  std::uint64_t steps_ = 0;
  EventCounts events_;
};

TrialResult run_trial(const TrialConfig& config);

/// Agreement/validity/majority checks for finished trials.
struct RequirementReport {
  std::size_t trials = 0;
  std::size_t decided = 0;
  std::size_t timeouts = 0;
  std::size_t validity_violations = 0;
  /// Frequency of deciding the majority mark, populated when one side has at
  /// least three times as many writers as the other.
  std::optional<double> majority_frequency;
  std::optional<Value> majority_value;
  /// Lower bound on the majority decision probability at the strong-majority ratio.
  std::optional<double> majority_bound;

  bool validity_ok() const noexcept { return validity_violations == 0; }
};

RequirementReport check_requirements(const TrialResult& result, const Population& pop,
                                     std::size_t n = 0);
RequirementReport check_requirements(std::span<const TrialResult> results,
                                     const Population& pop, std::size_t n = 0);

}  // namespace epicon
