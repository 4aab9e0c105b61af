#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "epicon/rng.hpp"
#include "epicon/strand.hpp"

namespace epicon {

enum class Role : std::uint8_t { Writer, Eraser };

struct AgentKind {
  Role role;
  Value mark;

  friend bool operator==(const AgentKind&, const AgentKind&) = default;
};

/// A mobile writer or eraser. Position is simulator bookkeeping; the rules
/// themselves only look at the current cell and the one just passed.
struct Agent {
  AgentKind kind;
  std::size_t position = 0;
  int direction = +1;
  bool waiting = false;       // Waiting variant
  bool active = true;         // ActiveInactive variant
  std::uint16_t streak = 0;   // ActiveInactive only; not part of the two-bit budget

  friend bool operator==(const Agent&, const Agent&) = default;
};

/// Writer counts; eraser counts are coupled as e0 = w1 and e1 = w0.
class Population {
 public:
  Population(std::size_t w0, std::size_t w1);

  std::size_t w0() const noexcept { return w0_; }
  std::size_t w1() const noexcept { return w1_; }
  std::size_t e0() const noexcept { return w1_; }
  std::size_t e1() const noexcept { return w0_; }
  std::size_t writers(Value v) const noexcept { return v == Value::Zero ? w0_ : w1_; }
  std::size_t total() const noexcept { return 2 * (w0_ + w1_); }

  friend bool operator==(const Population&, const Population&) = default;

 private:
  std::size_t w0_;
  std::size_t w1_;
};

enum class VariantKind : std::uint8_t { Naive, Basic, Waiting, SelfStabilizing, ActiveInactive };

struct Variant {
  VariantKind kind = VariantKind::Basic;
  double epsilon = 0.0;  // SelfStabilizing
  unsigned k1 = 0;       // ActiveInactive
  unsigned k2 = 0;

  static Variant naive() { return {VariantKind::Naive}; }
  static Variant basic() { return {VariantKind::Basic}; }
  static Variant waiting() { return {VariantKind::Waiting}; }
  static Variant self_stabilizing(double epsilon);
  static Variant active_inactive(unsigned k1, unsigned k2);

  /// "naive" | "basic" | "waiting" | "self-stabilizing" | "active-inactive".
  static Variant parse(std::string_view name, double epsilon = 1e-3, unsigned k1 = 2,
                       unsigned k2 = 2);

  std::string name() const;
  /// True for every variant whose agents fit in position + direction + two bits.
  bool two_bit() const noexcept { return kind != VariantKind::ActiveInactive; }

  friend bool operator==(const Variant&, const Variant&) = default;
};

/// What an atomic step did to the strand.
enum class StepOutcome : std::uint8_t { None, Wrote, Erased, ForcedErase };

/// One agent per population member, in the order 0-writers, 1-writers,
/// 0-erasers, 1-erasers. Positions and directions are uniform.
std::vector<Agent> spawn_agents(const Population& pop, std::size_t n, Rng& rng);

StepOutcome writer_step(Agent& agent, Strand& strand, const Variant& variant);

/// `rng` is consumed only by the SelfStabilizing variant (one draw per step).
StepOutcome eraser_step(Agent& agent, Strand& strand, const Variant& variant, Rng& rng);

/// Naive baseline: writers race toward cell 0, and the mark in cell 0 decides
/// who keeps writing. Erasers do nothing.
StepOutcome naive_step(Agent& agent, Strand& strand);

/// Dispatches on role and variant.
StepOutcome agent_step(Agent& agent, Strand& strand, const Variant& variant, Rng& rng);

/// The cell just passed, if it exists.
inline bool predecessor(const Agent& a, std::size_t n, std::size_t& out) noexcept {
  const auto prev = static_cast<std::ptrdiff_t>(a.position) - a.direction;
  if (prev < 0 || prev >= static_cast<std::ptrdiff_t>(n)) return false;
  out = static_cast<std::size_t>(prev);
  return true;
}

}  // namespace epicon
