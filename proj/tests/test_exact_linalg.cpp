#include <algorithm>
#include <numeric>

#include <gtest/gtest.h>

#include "ctrace/exact_linalg.hpp"
#include "support.hpp"

using namespace ctrace;
using ctrace::testing::divides;
using ctrace::testing::Rng;

namespace {

// Leibniz expansion: slow, but shares nothing with the library routines.
Integer leibniz_det(const IntMatrix &a) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Integer total = 0;
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (perm[i] > perm[j])
          ++inversions;
    Integer term = inversions % 2 == 0 ? 1 : -1;
    for (std::size_t i = 0; i < n; ++i)
      term *= a(i, perm[i]);
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

// Sum of the principal i x i minors, by bitmask enumeration.
Integer principal_minor_sum(const IntMatrix &a, std::size_t i) {
  const std::size_t n = a.rows();
  Integer total = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != i)
      continue;
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < n; ++k)
      if (mask & (1u << k))
        idx.push_back(k);
    IntMatrix minor(i, i);
    for (std::size_t r = 0; r < i; ++r)
      for (std::size_t c = 0; c < i; ++c)
        minor(r, c) = a(idx[r], idx[c]);
    total += leibniz_det(minor);
  }
  return total;
}

void expect_valid_snf(const IntMatrix &a) {
  const auto d = snf(a);
  ASSERT_EQ(d.U * a * d.V, d.D);
  EXPECT_EQ(abs(determinant(d.U)), 1);
  EXPECT_EQ(abs(determinant(d.V)), 1);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) {
        EXPECT_EQ(d.D(i, j), 0);
      }
  const auto divs = d.divisors();
  for (std::size_t i = 0; i < divs.size(); ++i) {
    EXPECT_GE(divs[i], 0);
    if (i + 1 < divs.size()) {
      EXPECT_TRUE(divides(divs[i], divs[i + 1]))
          << divs[i] << " does not divide " << divs[i + 1];
    }
  }
}

} // namespace

TEST(Snf, IdentityIsFixed) {
  EXPECT_EQ(snf(IntMatrix::identity(2)).D, IntMatrix::identity(2));
}

TEST(Snf, ZeroIsFixed) {
  EXPECT_EQ(snf(IntMatrix(2, 3)).D, IntMatrix(2, 3));
}

TEST(Snf, DiagTwoThree) {
  // By hand: gcd(2,3) = 1 and 2*3 = 6, so the invariant factors are 1, 6.
  const auto d = snf(IntMatrix{{2, 0}, {0, 3}});
  EXPECT_EQ(d.D, (IntMatrix{{1, 0}, {0, 6}}));
  expect_valid_snf(IntMatrix{{2, 0}, {0, 3}});
}

TEST(Snf, TextbookExample) {
  // Known invariant factors 2, 6, 12.
  const IntMatrix a{{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}};
  EXPECT_EQ(snf(a).divisors(), (std::vector<Integer>{2, 6, 12}));
  expect_valid_snf(a);
}

TEST(Snf, EmptyShapes) {
  expect_valid_snf(IntMatrix(0, 3));
  expect_valid_snf(IntMatrix(3, 0));
  EXPECT_EQ(rank(IntMatrix(0, 0)), 0u);
}

TEST(Snf, BigEntriesStayExact) {
  // 2^80 and 3^50 are coprime; fixed-width arithmetic would overflow.
  const Integer p = Integer(1) << 80;
  Integer q = 1;
  for (int i = 0; i < 50; ++i)
    q *= 3;
  const auto d = snf(IntMatrix{{p, 0}, {0, q}});
  EXPECT_EQ(d.D(0, 0), 1);
  EXPECT_EQ(d.D(1, 1), p * q);
}

TEST(Snf, RandomWitnesses) {
  Rng rng(20240501);
  for (int trial = 0; trial < 200; ++trial) {
    const auto r = static_cast<std::size_t>(rng.uniform(1, 6));
    const auto c = static_cast<std::size_t>(rng.uniform(1, 6));
    const auto a = rng.matrix(r, c, 9);
    SCOPED_TRACE(trial);
    expect_valid_snf(a);
  }
}

TEST(Snf, Deterministic) {
  Rng rng(7);
  const auto a = rng.matrix(5, 4, 9);
  const auto d1 = snf(a), d2 = snf(a);
  EXPECT_EQ(d1.U, d2.U);
  EXPECT_EQ(d1.V, d2.V);
}

TEST(Cokernel, Examples) {
  EXPECT_EQ(cokernel(IntMatrix{{5}}), (AbelianGroup{0, {5}}));
  EXPECT_EQ(cokernel(IntMatrix{{2}}), (AbelianGroup{0, {2}}));
  EXPECT_EQ(cokernel(IntMatrix{{0}}), (AbelianGroup{1, {}}));
  EXPECT_EQ(cokernel(IntMatrix{{2, 0}, {0, 3}}), (AbelianGroup{0, {6}}));
  EXPECT_EQ(cokernel(IntMatrix(3, 0)), (AbelianGroup{3, {}}));
}

TEST(Cokernel, PresentationClassifies) {
  // Z^2 / <(2, 0)> = Z/2 + Z: (1, 5) is nonzero in Z/2, (4, 0) vanishes.
  const auto p = cokernel_presentation(IntMatrix{{2}, {0}});
  EXPECT_EQ(p.group(), (AbelianGroup{1, {2}}));
  const auto z = p.classify({4, 0});
  EXPECT_TRUE(std::all_of(z.begin(), z.end(), [](auto &x) { return x == 0; }));
  const auto w = p.classify({1, 5});
  EXPECT_FALSE(std::all_of(w.begin(), w.end(), [](auto &x) { return x == 0; }));
}

TEST(Cokernel, InvariantUnderUnimodularChange) {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const auto r = static_cast<std::size_t>(rng.uniform(1, 5));
    const auto c = static_cast<std::size_t>(rng.uniform(1, 5));
    const auto a = rng.matrix(r, c, 6);
    const auto b = rng.unimodular(r) * a * rng.unimodular(c);
    EXPECT_EQ(cokernel(a), cokernel(b)) << "trial " << trial;
  }
}

TEST(KernelBasis, Examples) {
  EXPECT_EQ(kernel_basis(IntMatrix::identity(3)).cols(), 0u);
  const auto k = kernel_basis(IntMatrix(2, 2));
  EXPECT_EQ(k.cols(), 2u);
  EXPECT_EQ(abs(determinant(k)), 1);
  // [1 1] x = 0 has solutions t (1, -1).
  const auto one = kernel_basis(IntMatrix{{1, 1}});
  ASSERT_EQ(one.cols(), 1u);
  const auto v = one.column(0);
  EXPECT_TRUE((v == IntVector{1, -1}) || (v == IntVector{-1, 1}));
}

TEST(KernelBasis, RankNullity) {
  Rng rng(314);
  for (int trial = 0; trial < 100; ++trial) {
    const auto r = static_cast<std::size_t>(rng.uniform(1, 6));
    const auto c = static_cast<std::size_t>(rng.uniform(1, 6));
    const auto a = rng.matrix(r, c, 3);
    const auto k = kernel_basis(a);
    EXPECT_EQ(rank(a) + k.cols(), c);
    EXPECT_TRUE((a * k).is_zero());
    // saturated: the kernel lattice is a direct summand
    if (k.cols() > 0) {
      EXPECT_TRUE(cokernel(k).is_free());
    }
  }
}

TEST(Determinant, MatchesLeibniz) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform(0, 5));
    const auto a = rng.matrix(n, n, 9);
    EXPECT_EQ(determinant(a), leibniz_det(a));
    EXPECT_EQ(determinant(to_rational(a)), Rational(leibniz_det(a)));
  }
}

TEST(UnimodularInverse, RoundTrip) {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const auto u = rng.unimodular(4);
    EXPECT_EQ(unimodular_inverse(u) * u, IntMatrix::identity(4));
  }
  EXPECT_THROW(unimodular_inverse(IntMatrix{{2}}), ComputeError);
}

TEST(ExteriorPower, Examples) {
  const IntMatrix a{{2, 3}, {5, 7}};
  EXPECT_EQ(exterior_power(a, 0), (IntMatrix{{1}}));
  EXPECT_EQ(exterior_power(a, 1), a);
  EXPECT_EQ(exterior_power(a, 2), (IntMatrix{{2 * 7 - 3 * 5}}));
  EXPECT_THROW(exterior_power(a, 3), InputError);
  EXPECT_THROW(exterior_power(IntMatrix(2, 3), 1), InputError);
}

TEST(ExteriorPower, TraceIsPrincipalMinorSum) {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform(1, 5));
    const auto a = rng.matrix(n, n, 5);
    for (std::size_t i = 0; i <= n; ++i)
      EXPECT_EQ(exterior_power(a, i).trace(), principal_minor_sum(a, i));
  }
}

TEST(ExteriorPower, Functorial) {
  Rng rng(12);
  const auto a = rng.matrix(4, 4, 4), b = rng.matrix(4, 4, 4);
  for (std::size_t i = 0; i <= 4; ++i)
    EXPECT_EQ(exterior_power(a * b, i),
              exterior_power(a, i) * exterior_power(b, i));
}

TEST(ExteriorPower, AlternatingTraceIsCharacteristicValue) {
  // sum (-1)^i tr L^i A = det(I - A); the right side via rational
  // elimination, the left via exterior powers.
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform(1, 5));
    const auto a = rng.matrix(n, n, 9);
    Integer lhs = 0;
    for (std::size_t i = 0; i <= n; ++i)
      lhs += (i % 2 == 0 ? 1 : -1) * exterior_power(a, i).trace();
    const Rational rhs =
        determinant(RatMatrix::identity(n) - to_rational(a));
    EXPECT_EQ(Rational(lhs), rhs) << "trial " << trial;
  }
}

TEST(Modular, ReduceAndDivide) {
  EXPECT_EQ(reduce_mod(-1, 5), 4);
  EXPECT_EQ(reduce_mod(7, 0), 7);
  // 3 t = 4 mod 5 -> t = 3
  EXPECT_EQ(reduce_mod(divide_mod(4, 3, 5) * 3 - 4, 5), 0);
}
