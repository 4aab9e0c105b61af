#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace epicon {

/// Binary mark carried by writers, erasers and non-empty cells.
enum class Value : std::uint8_t { Zero = 0, One = 1 };

constexpr Value complement(Value v) noexcept {
  return v == Value::Zero ? Value::One : Value::Zero;
}

constexpr int to_int(Value v) noexcept { return static_cast<int>(v); }

/// Tri-state cell. Empty is the erased/unwritten state.
enum class CellState : std::uint8_t { Empty, Zero, One };

constexpr CellState cell_of(Value v) noexcept {
  return v == Value::Zero ? CellState::Zero : CellState::One;
}

constexpr bool holds(CellState c, Value v) noexcept { return c == cell_of(v); }

char to_char(CellState c) noexcept;

/// One recorded mutation. `before` and `after` differ and one of them is Empty.
struct Transition {
  std::size_t index;
  CellState before;
  CellState after;
};

struct Census {
  std::size_t zeros = 0;
  std::size_t ones = 0;
  std::size_t empties = 0;
};

/// Fixed-length array of tri-state cells. The only mutators are try_write and
/// try_erase, so every legal transition goes through one choke point.
class Strand {
 public:
  using Observer = std::function<void(const Transition&)>;

  explicit Strand(std::size_t n);

  /// Parses the trace alphabet {V,0,1}.
  static Strand parse(std::string_view cells);

  std::size_t size() const noexcept { return cells_.size(); }
  CellState operator[](std::size_t i) const noexcept { return cells_[i]; }
  CellState at(std::size_t i) const;

  /// V -> v. Returns false (and leaves the strand unchanged) if the cell is occupied.
  bool try_write(std::size_t index, Value v);
  /// v -> V. Returns false unless the cell currently holds v.
  bool try_erase(std::size_t index, Value v);

  const Census& census() const noexcept { return census_; }
  std::size_t count_collisions() const noexcept;
  std::optional<Value> consensus_value() const noexcept;

  std::string to_string() const;

  /// Called after every successful mutation. Pass an empty function to detach.
  void set_observer(Observer obs) { observer_ = std::move(obs); }

  friend bool operator==(const Strand& a, const Strand& b) noexcept {
    return a.cells_ == b.cells_;
  }

 private:
  void check_index(std::size_t index) const;
  void recount(CellState c, int delta) noexcept;

  std::vector<CellState> cells_;
  Census census_;
  Observer observer_;
};

inline std::size_t count_collisions(const Strand& s) noexcept {
  return s.count_collisions();
}

inline std::optional<Value> consensus_value(const Strand& s) noexcept {
  return s.consensus_value();
}

}  // namespace epicon
