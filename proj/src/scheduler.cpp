#include "epicon/scheduler.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "epicon/bounds.hpp"

namespace epicon {

void TrialConfig::validate() const {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
}

std::uint64_t TrialConfig::step_cap() const noexcept {
  return max_big_steps == 0 ? default_max_big_steps(n) : max_big_steps;
}

std::uint64_t default_max_big_steps(std::size_t n) noexcept {
  return 100ULL * n * n;
}

const char* to_string(Schedule s) noexcept {
  return s == Schedule::Rounds ? "rounds" : "async";
}

Schedule parse_schedule(std::string_view name) {
  if (name == "async") return Schedule::Asynchronous;
  if (name == "rounds") return Schedule::Rounds;
  throw std::invalid_argument("unknown schedule '" + std::string(name) +
                              "' (expected async or rounds)");
}

const char* to_string(Decision d) noexcept {
  switch (d) {
    case Decision::Zero:
      return "0";
    case Decision::One:
      return "1";
    case Decision::Timeout:
      break;
  }
  return "timeout";
}

StepMetrics measure(const Strand& s) noexcept {
  const Census& c = s.census();
  return {c.zeros, c.ones, c.empties, s.count_collisions()};
}

Trial::Trial(const TrialConfig& config) : Trial(config, Strand(config.n)) {}

Trial::Trial(const TrialConfig& config, Strand initial)
    : config_(config),
      strand_(std::move(initial)),
      schedule_rng_(make_stream(config.seed, Stream::Schedule)),
      variant_rng_(make_stream(config.seed, Stream::Variant)) {
  config_.validate();
  if (strand_.size() != config_.n) {
    throw std::invalid_argument("initial strand length does not match n");
  }
  Rng spawn_rng = make_stream(config_.seed, Stream::Spawn);
  agents_ = spawn_agents(config_.pop, config_.n, spawn_rng);
  order_.resize(agents_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (config_.schedule == Schedule::Asynchronous) {
    next_time_.resize(agents_.size());
    for (double& t : next_time_) t = step_duration(schedule_rng_);
    std::make_heap(order_.begin(), order_.end(), later_than());
  }
}

double Trial::step_duration(Rng& rng) {
  // Uniform on (0, 1].
  return 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

void Trial::round() {
  ++steps_;
  if (config_.schedule == Schedule::Rounds) {
    std::shuffle(order_.begin(), order_.end(), schedule_rng_);
    for (std::size_t idx : order_) {
      record(agent_step(agents_[idx], strand_, config_.variant, variant_rng_));
    }
    return;
  }
  const double horizon = static_cast<double>(steps_);
  const auto cmp = later_than();
  while (next_time_[order_.front()] <= horizon) {
    std::pop_heap(order_.begin(), order_.end(), cmp);
    const std::size_t idx = order_.back();
    record(agent_step(agents_[idx], strand_, config_.variant, variant_rng_));
    next_time_[idx] += step_duration(schedule_rng_);
    std::push_heap(order_.begin(), order_.end(), cmp);
  }
}

void Trial::record(StepOutcome outcome) {
  switch (outcome) {
    case StepOutcome::Wrote:
      ++events_.writes;
      break;
    case StepOutcome::ForcedErase:
      ++events_.forced_erases;
      [[fallthrough]];
    case StepOutcome::Erased:
      ++events_.erases;
      if (!events_.first_erase_step) events_.first_erase_step = steps_;
      break;
    case StepOutcome::None:
      break;
  }
}

StepMetrics Trial::big_step() {
  round();
  return measure(strand_);
}

template <typename Done>
TrialResult Trial::drive(Done done) {
  TrialResult result;
  result.seed = config_.seed;
  const std::uint64_t cap = config_.step_cap();
  const std::uint64_t start = steps_;
  while (steps_ - start < cap) {
    round();
    if (config_.record_trajectory) result.trajectory.push_back(measure(strand_));
    if (auto v = done()) {
      result.decision = decision_of(*v);
      break;
    }
  }
  result.big_steps = steps_ - start;
  return result;
}

TrialResult Trial::run() {
  return drive([this] { return strand_.consensus_value(); });
}

TrialResult Trial::run_until(Value target) {
  return drive([this, target]() -> std::optional<Value> {
    if (strand_.consensus_value() == target) return target;
    return std::nullopt;
  });
}

TrialResult run_trial(const TrialConfig& config) {
  Trial trial(config);
  return trial.run();
}

RequirementReport check_requirements(const TrialResult& result, const Population& pop,
                                     std::size_t n) {
  return check_requirements(std::span<const TrialResult>(&result, 1), pop, n);
}

RequirementReport check_requirements(std::span<const TrialResult> results,
                                     const Population& pop, std::size_t n) {
  RequirementReport report;
  report.trials = results.size();

  std::optional<Value> majority;
  if (pop.w1() >= 3 * pop.w0()) majority = Value::One;
  else if (pop.w0() >= 3 * pop.w1()) majority = Value::Zero;

  std::size_t majority_wins = 0;
  for (const TrialResult& r : results) {
    if (r.decision == Decision::Timeout) {
      ++report.timeouts;
      continue;
    }
    ++report.decided;
    const Value v = r.decision == Decision::One ? Value::One : Value::Zero;
    if (pop.writers(v) == 0) ++report.validity_violations;
    if (majority && v == *majority) ++majority_wins;
  }

  if (majority && report.decided > 0) {
    report.majority_value = majority;
    report.majority_frequency =
        static_cast<double>(majority_wins) / static_cast<double>(report.decided);
    const std::size_t strong = pop.writers(*majority);
    const std::size_t weak = pop.writers(complement(*majority));
    if (n >= 2 && weak > 0) {
      report.majority_bound = majority_prob_lower_bound(weak, strong, n).theorem2;
    }
  }
  return report;
}

}  // namespace epicon
