#pragma once

#include <cstdint>
#include <random>

#include "ctrace/exact_linalg.hpp"

namespace ctrace::testing {

// Fixed seeds everywhere: failures must reproduce.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  long long uniform(long long lo, long long hi) {
    return std::uniform_int_distribution<long long>(lo, hi)(gen_);
  }

  IntMatrix matrix(std::size_t rows, std::size_t cols, long long bound) {
    IntMatrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        a(i, j) = uniform(-bound, bound);
    return a;
  }

  // Product of random elementary operations; determinant +-1 by
  // construction.
  IntMatrix unimodular(std::size_t n, int steps = 12) {
    IntMatrix u = IntMatrix::identity(n);
    if (n == 0)
      return u;
    for (int s = 0; s < steps; ++s) {
      const auto i = static_cast<std::size_t>(uniform(0, long(n) - 1));
      const auto j = static_cast<std::size_t>(uniform(0, long(n) - 1));
      switch (uniform(0, 2)) {
      case 0:
        if (i != j)
          u.add_row(i, j, Integer(uniform(-3, 3)));
        break;
      case 1:
        u.swap_rows(i, j);
        break;
      default:
        u.negate_row(i);
      }
    }
    return u;
  }

private:
  std::mt19937_64 gen_;
};

inline bool divides(const Integer &a, const Integer &b) {
  return a == 0 ? b == 0 : b % a == 0;
}

} // namespace ctrace::testing
