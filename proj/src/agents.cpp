#include "epicon/agents.hpp"

#include <stdexcept>

namespace epicon {

namespace {

// Move one cell; at either end of the strand reverse and continue.
void advance(Agent& a, std::size_t n) noexcept {
  const auto next = static_cast<std::ptrdiff_t>(a.position) + a.direction;
  if (next < 0 || next >= static_cast<std::ptrdiff_t>(n)) {
    a.direction = -a.direction;
    a.position = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(a.position) + a.direction);
    return;
  }
  a.position = static_cast<std::size_t>(next);
}

// (1-v, v) seen in travel order.
bool at_collision(const Agent& a, const Strand& s) noexcept {
  std::size_t prev = 0;
  if (!predecessor(a, s.size(), prev)) return false;
  const Value v = a.kind.mark;
  return holds(s[prev], complement(v)) && holds(s[a.position], v);
}

void update_activity(Agent& a, CellState seen, const Variant& variant) noexcept {
  const Value v = a.kind.mark;
  const Value trigger = a.active ? complement(v) : v;
  const unsigned limit = a.active ? variant.k1 : variant.k2;
  a.streak = holds(seen, trigger) ? static_cast<std::uint16_t>(a.streak + 1) : 0;
  if (a.streak >= limit) {
    a.active = !a.active;
    a.streak = 0;
  }
}

}  // namespace

Population::Population(std::size_t w0, std::size_t w1) : w0_(w0), w1_(w1) {
  if (w0 + w1 == 0) throw std::invalid_argument("population needs at least one writer");
}

Variant Variant::self_stabilizing(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("self-stabilizing epsilon must lie in (0, 1)");
  }
  return {VariantKind::SelfStabilizing, epsilon};
}

Variant Variant::active_inactive(unsigned k1, unsigned k2) {
  if (k1 < 1 || k2 < 1) throw std::invalid_argument("k1 and k2 must be at least 1");
  return {VariantKind::ActiveInactive, 0.0, k1, k2};
}

Variant Variant::parse(std::string_view name, double epsilon, unsigned k1, unsigned k2) {
  if (name == "naive") return naive();
  if (name == "basic") return basic();
  if (name == "waiting") return waiting();
  if (name == "self-stabilizing") return self_stabilizing(epsilon);
  if (name == "active-inactive") return active_inactive(k1, k2);
  throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

std::string Variant::name() const {
  switch (kind) {
    case VariantKind::Naive:
      return "naive";
    case VariantKind::Basic:
      return "basic";
    case VariantKind::Waiting:
      return "waiting";
    case VariantKind::SelfStabilizing:
      return "self-stabilizing";
    case VariantKind::ActiveInactive:
      return "active-inactive";
  }
  return "unknown";
}

std::vector<Agent> spawn_agents(const Population& pop, std::size_t n, Rng& rng) {
  if (n < 2) throw std::invalid_argument("strand length must be at least 2");
  std::uniform_int_distribution<std::size_t> where(0, n - 1);
  std::bernoulli_distribution heads(0.5);

  std::vector<Agent> agents;
  agents.reserve(pop.total());
  auto add = [&](std::size_t count, Role role, Value mark) {
    for (std::size_t k = 0; k < count; ++k) {
      Agent a{{role, mark}};
      a.position = where(rng);
      a.direction = heads(rng) ? +1 : -1;
      agents.push_back(a);
    }
  };
  add(pop.w0(), Role::Writer, Value::Zero);
  add(pop.w1(), Role::Writer, Value::One);
  add(pop.e0(), Role::Eraser, Value::Zero);
  add(pop.e1(), Role::Eraser, Value::One);
  return agents;
}

StepOutcome writer_step(Agent& agent, Strand& strand, const Variant& variant) {
  const std::size_t cur = agent.position;
  StepOutcome out = StepOutcome::None;
  if (variant.kind == VariantKind::ActiveInactive) {
    if (agent.active && strand.try_write(cur, agent.kind.mark)) out = StepOutcome::Wrote;
    update_activity(agent, strand[cur], variant);
  } else if (strand.try_write(cur, agent.kind.mark)) {
    out = StepOutcome::Wrote;
  }
  advance(agent, strand.size());
  return out;
}

StepOutcome eraser_step(Agent& agent, Strand& strand, const Variant& variant, Rng& rng) {
  const std::size_t cur = agent.position;
  const Value v = agent.kind.mark;

  switch (variant.kind) {
    case VariantKind::Waiting: {
      if (agent.waiting && strand[cur] == CellState::Empty) {
        // The attached complementary writer fills the cell the eraser emptied.
        agent.waiting = false;
        const bool wrote = strand.try_write(cur, complement(v));
        advance(agent, strand.size());
        return wrote ? StepOutcome::Wrote : StepOutcome::None;
      }
      if (at_collision(agent, strand)) {
        strand.try_erase(cur, v);
        agent.waiting = true;
        return StepOutcome::Erased;
      }
      agent.waiting = false;
      advance(agent, strand.size());
      return StepOutcome::None;
    }
    case VariantKind::SelfStabilizing: {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      if (unit(rng) < variant.epsilon && strand.try_erase(cur, v)) {
        advance(agent, strand.size());
        return StepOutcome::ForcedErase;
      }
      break;
    }
    default:
      break;
  }

  StepOutcome out = StepOutcome::None;
  if (at_collision(agent, strand) && strand.try_erase(cur, v)) out = StepOutcome::Erased;
  advance(agent, strand.size());
  return out;
}

StepOutcome naive_step(Agent& agent, Strand& strand) {
  if (agent.kind.role == Role::Eraser) return StepOutcome::None;

  const CellState decided = strand[0];
  if (decided == CellState::Empty) {
    // Race toward the shared "leftmost" cell without writing anything else.
    if (agent.position == 0) {
      strand.try_write(0, agent.kind.mark);
      agent.direction = +1;
      agent.position = 1;
      return StepOutcome::Wrote;
    }
    agent.direction = -1;
    --agent.position;
    return StepOutcome::None;
  }
  if (holds(decided, agent.kind.mark)) return writer_step(agent, strand, Variant::basic());
  advance(agent, strand.size());
  return StepOutcome::None;
}

StepOutcome agent_step(Agent& agent, Strand& strand, const Variant& variant, Rng& rng) {
  if (variant.kind == VariantKind::Naive) return naive_step(agent, strand);
  if (agent.kind.role == Role::Writer) return writer_step(agent, strand, variant);
  return eraser_step(agent, strand, variant, rng);
}

}  // namespace epicon
