#pragma once

#include <cstdint>

namespace simtlab {

/// Logical tally of elementary arithmetic, by category. Counts follow the
/// algorithm's arithmetic (one complex multiply counts as one multiply),
/// not hardware instructions.
struct OpCounter {
  std::uint64_t multiplies = 0;
  std::uint64_t additions = 0;  // additions and subtractions

  OpCounter& operator+=(const OpCounter& other) noexcept {
    multiplies += other.multiplies;
    additions += other.additions;
    return *this;
  }

  friend OpCounter operator+(OpCounter lhs, const OpCounter& rhs) noexcept {
    return lhs += rhs;
  }

  friend bool operator==(const OpCounter&, const OpCounter&) = default;
};

}  // namespace simtlab
