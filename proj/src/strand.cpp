#include "epicon/strand.hpp"

namespace epicon {

char to_char(CellState c) noexcept {
  switch (c) {
    case CellState::Zero:
      return '0';
    case CellState::One:
      return '1';
    case CellState::Empty:
      break;
  }
  return 'V';
}

Strand::Strand(std::size_t n) : cells_(n, CellState::Empty) {
  if (n < 2) {
    throw std::invalid_argument("strand length must be at least 2, got " +
                                std::to_string(n));
  }
  census_.empties = n;
}

Strand Strand::parse(std::string_view text) {
  Strand s(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    switch (text[i]) {
      case 'V':
        break;
      case '0':
        s.try_write(i, Value::Zero);
        break;
      case '1':
        s.try_write(i, Value::One);
        break;
      default:
        throw std::invalid_argument(std::string("invalid cell character '") +
                                    text[i] + "' (expected V, 0 or 1)");
    }
  }
  return s;
}

CellState Strand::at(std::size_t i) const {
  check_index(i);
  return cells_[i];
}

void Strand::check_index(std::size_t index) const {
  if (index >= cells_.size()) {
    throw std::out_of_range("cell index " + std::to_string(index) +
                            " out of range for strand of length " +
                            std::to_string(cells_.size()));
  }
}

void Strand::recount(CellState c, int delta) noexcept {
  switch (c) {
    case CellState::Zero:
      census_.zeros += delta;
      break;
    case CellState::One:
      census_.ones += delta;
      break;
    case CellState::Empty:
      census_.empties += delta;
      break;
  }
}

bool Strand::try_write(std::size_t index, Value v) {
  check_index(index);
  if (cells_[index] != CellState::Empty) return false;
  const CellState after = cell_of(v);
  cells_[index] = after;
  recount(CellState::Empty, -1);
  recount(after, +1);
  if (observer_) observer_({index, CellState::Empty, after});
  return true;
}

bool Strand::try_erase(std::size_t index, Value v) {
  check_index(index);
  const CellState before = cells_[index];
  if (!holds(before, v)) return false;
  cells_[index] = CellState::Empty;
  recount(before, -1);
  recount(CellState::Empty, +1);
  if (observer_) observer_({index, before, CellState::Empty});
  return true;
}

std::size_t Strand::count_collisions() const noexcept {
  std::size_t count = 0;
  for (std::size_t i = 0; i + 1 < cells_.size(); ++i) {
    const CellState a = cells_[i];
    const CellState b = cells_[i + 1];
    if (a != CellState::Empty && b != CellState::Empty && a != b) ++count;
  }
  return count;
}

std::optional<Value> Strand::consensus_value() const noexcept {
  const std::size_t n = cells_.size();
  if (census_.zeros == n) return Value::Zero;
  if (census_.ones == n) return Value::One;
  return std::nullopt;
}

std::string Strand::to_string() const {
  std::string out;
  out.reserve(cells_.size());
  for (CellState c : cells_) out.push_back(to_char(c));
  return out;
}

}  // namespace epicon
