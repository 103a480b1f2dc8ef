#pragma once

// Exact integer and rational linear algebra over arbitrary-precision numbers.
//
// Matrices act on column vectors. A matrix of shape rows x cols maps Z^cols to
// Z^rows; induced maps and differentials follow that convention everywhere.

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ctrace/error.hpp"

namespace ctrace {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Dense row-major matrix over an exact ring.
template <typename T>
class Matrix {
public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  Matrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ == 0 ? 0 : init.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto &row : init) {
      if (row.size() != cols_)
        throw InputError("ragged matrix initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      m(i, i) = T(1);
    return m;
  }

  static Matrix from_rows(const std::vector<std::vector<T>> &rows,
                          std::size_t cols_if_empty = 0) {
    Matrix m(rows.size(), rows.empty() ? cols_if_empty : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_)
        throw InputError("ragged matrix rows");
      for (std::size_t j = 0; j < m.cols_; ++j)
        m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }
  bool square() const noexcept { return rows_ == cols_; }

  T &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T &operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::vector<T> column(std::size_t c) const {
    std::vector<T> v(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      v[r] = (*this)(r, c);
    return v;
  }
  std::vector<T> row(std::size_t r) const {
    return {data_.begin() + r * cols_, data_.begin() + (r + 1) * cols_};
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const T &x) { return x == 0; });
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        t(j, i) = (*this)(i, j);
    return t;
  }

  T trace() const {
    if (!square())
      throw InputError("trace of a non-square matrix");
    T s(0);
    for (std::size_t i = 0; i < rows_; ++i)
      s += (*this)(i, i);
    return s;
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b)
      return;
    for (std::size_t j = 0; j < cols_; ++j)
      std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b)
      return;
    for (std::size_t i = 0; i < rows_; ++i)
      std::swap((*this)(i, a), (*this)(i, b));
  }
  // row[dst] += q * row[src]
  void add_row(std::size_t dst, std::size_t src, const T &q) {
    for (std::size_t j = 0; j < cols_; ++j)
      (*this)(dst, j) += q * (*this)(src, j);
  }
  // col[dst] += q * col[src]
  void add_col(std::size_t dst, std::size_t src, const T &q) {
    for (std::size_t i = 0; i < rows_; ++i)
      (*this)(i, dst) += q * (*this)(i, src);
  }
  void negate_row(std::size_t r) {
    for (std::size_t j = 0; j < cols_; ++j)
      (*this)(r, j) = -(*this)(r, j);
  }

  friend bool operator==(const Matrix &a, const Matrix &b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  friend Matrix operator*(const Matrix &a, const Matrix &b) {
    if (a.cols_ != b.rows_)
      throw InputError("matrix product shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T &aik = a(i, k);
        if (aik == 0)
          continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend std::vector<T> operator*(const Matrix &a, const std::vector<T> &v) {
    if (a.cols_ != v.size())
      throw InputError("matrix-vector shape mismatch");
    std::vector<T> out(a.rows_, T(0));
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j)
        out[i] += a(i, j) * v[j];
    return out;
  }

  friend Matrix operator+(Matrix a, const Matrix &b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
      throw InputError("matrix sum shape mismatch");
    for (std::size_t i = 0; i < a.data_.size(); ++i)
      a.data_[i] += b.data_[i];
    return a;
  }
  friend Matrix operator-(Matrix a, const Matrix &b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
      throw InputError("matrix difference shape mismatch");
    for (std::size_t i = 0; i < a.data_.size(); ++i)
      a.data_[i] -= b.data_[i];
    return a;
  }
  friend Matrix operator*(const T &s, Matrix a) {
    for (auto &x : a.data_)
      x *= s;
    return a;
  }
  Matrix operator-() const { return T(-1) * *this; }

  friend std::ostream &operator<<(std::ostream &os, const Matrix &m) {
    os << '[';
    for (std::size_t i = 0; i < m.rows_; ++i) {
      os << (i ? "; " : "");
      for (std::size_t j = 0; j < m.cols_; ++j)
        os << (j ? " " : "") << m(i, j);
    }
    return os << ']';
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = Matrix<Integer>;
using RatMatrix = Matrix<Rational>;
using IntVector = std::vector<Integer>;

inline RatMatrix to_rational(const IntMatrix &a) {
  RatMatrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      r(i, j) = Rational(a(i, j));
  return r;
}

/// Smith normal form with unimodular witnesses: U * A * V == D.
struct SNFDecomposition {
  IntMatrix U;
  IntMatrix D;
  IntMatrix V;

  std::size_t rank() const {
    std::size_t r = 0;
    while (r < std::min(D.rows(), D.cols()) && D(r, r) != 0)
      ++r;
    return r;
  }
  /// Nonzero diagonal entries d1 | d2 | ... (the elementary divisors).
  std::vector<Integer> divisors() const {
    std::vector<Integer> d;
    for (std::size_t i = 0; i < rank(); ++i)
      d.push_back(D(i, i));
    return d;
  }
};

namespace detail {

// Position of the nonzero entry of least absolute value in the trailing
// block [t.., t..]; ties go to the lowest row-major index. False when the
// block is zero.
inline bool smallest_pivot(const IntMatrix &a, std::size_t t,
                           std::pair<std::size_t, std::size_t> &at) {
  bool found = false;
  Integer best_abs;
  for (std::size_t i = t; i < a.rows(); ++i)
    for (std::size_t j = t; j < a.cols(); ++j) {
      const Integer &x = a(i, j);
      if (x == 0)
        continue;
      Integer ax = abs(x);
      if (!found || ax < best_abs) {
        at = {i, j};
        best_abs = std::move(ax);
        found = true;
      }
    }
  return found;
}

} // namespace detail

/// Smith normal form by smallest-pivot elimination. Empty matrices are fine.
inline SNFDecomposition snf(const IntMatrix &a) {
  const std::size_t m = a.rows(), n = a.cols();
  SNFDecomposition out{IntMatrix::identity(m), a, IntMatrix::identity(n)};
  IntMatrix &D = out.D;
  IntMatrix &U = out.U;
  IntMatrix &V = out.V;

  for (std::size_t t = 0; t < std::min(m, n); ++t) {
    std::pair<std::size_t, std::size_t> pivot{t, t};
    if (!detail::smallest_pivot(D, t, pivot))
      break;
    for (;;) {
      const auto [pi, pj] = pivot;
      D.swap_rows(t, pi);
      U.swap_rows(t, pi);
      D.swap_cols(t, pj);
      V.swap_cols(t, pj);

      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (D(i, t) == 0)
          continue;
        Integer q = D(i, t) / D(t, t); // truncating division
        D.add_row(i, t, -q);
        U.add_row(i, t, -q);
        if (D(i, t) != 0)
          clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (D(t, j) == 0)
          continue;
        Integer q = D(t, j) / D(t, t);
        D.add_col(j, t, -q);
        V.add_col(j, t, -q);
        if (D(t, j) != 0)
          clean = false;
      }
      if (!clean) {
        detail::smallest_pivot(D, t, pivot);
        continue;
      }
      // Divisibility: fold an offending row into row t and go again.
      std::optional<std::size_t> bad_row;
      for (std::size_t i = t + 1; i < m && !bad_row; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (D(i, j) % D(t, t) != 0) {
            bad_row = i;
            break;
          }
      if (!bad_row)
        break;
      D.add_row(t, *bad_row, Integer(1));
      U.add_row(t, *bad_row, Integer(1));
      pivot = {t, t};
    }
    if (D(t, t) < 0) {
      D.negate_row(t);
      U.negate_row(t);
    }
  }
  return out;
}

inline std::size_t rank(const IntMatrix &a) { return snf(a).rank(); }

/// Finitely generated abelian group Z^free_rank + sum of Z/torsion[i].
struct AbelianGroup {
  std::size_t free_rank = 0;
  std::vector<Integer> torsion; // each >= 2, each divides the next

  bool is_zero() const { return free_rank == 0 && torsion.empty(); }
  bool is_free() const { return torsion.empty(); }

  friend bool operator==(const AbelianGroup &, const AbelianGroup &) = default;

  /// Direct sum, with the torsion re-normalized to invariant factors.
  friend AbelianGroup operator+(const AbelianGroup &a, const AbelianGroup &b);

  std::string to_string() const {
    if (is_zero())
      return "0";
    std::ostringstream os;
    bool first = true;
    if (free_rank > 0) {
      os << "Z";
      if (free_rank > 1)
        os << '^' << free_rank;
      first = false;
    }
    for (const auto &t : torsion) {
      os << (first ? "" : " + ") << "Z/" << t;
      first = false;
    }
    return os.str();
  }
};

inline std::ostream &operator<<(std::ostream &os, const AbelianGroup &g) {
  return os << g.to_string();
}

/// Abelian group of a single cyclic-or-free summand list, normalized.
inline AbelianGroup abelian_group(std::size_t free_rank,
                                  const std::vector<Integer> &orders) {
  // Normalizing arbitrary cyclic orders to invariant factors is the
  // cokernel of the diagonal relation matrix.
  std::vector<Integer> nontrivial;
  for (const auto &o : orders)
    if (o != 1)
      nontrivial.push_back(abs(o));
  AbelianGroup g;
  g.free_rank = free_rank;
  IntMatrix rel(nontrivial.size(), nontrivial.size());
  for (std::size_t i = 0; i < nontrivial.size(); ++i)
    rel(i, i) = nontrivial[i];
  auto d = snf(rel);
  for (std::size_t i = 0; i < nontrivial.size(); ++i) {
    const Integer &x = d.D(i, i);
    if (x == 0)
      ++g.free_rank;
    else if (x > 1)
      g.torsion.push_back(x);
  }
  return g;
}

inline AbelianGroup operator+(const AbelianGroup &a, const AbelianGroup &b) {
  std::vector<Integer> orders = a.torsion;
  orders.insert(orders.end(), b.torsion.begin(), b.torsion.end());
  return abelian_group(a.free_rank + b.free_rank, orders);
}

/// Explicit presentation of coker(A) = Z^rows / colspan(A).
///
/// The quotient is sum_i Z/orders[i] (order 0 meaning a free summand); the
/// coordinates of the class of x are projection * x, with the i-th
/// coordinate read modulo orders[i] when orders[i] != 0.
struct CokernelPresentation {
  IntMatrix projection;        // generators x rows
  std::vector<Integer> orders; // torsion summands first, then zeros

  AbelianGroup group() const {
    AbelianGroup g;
    for (const auto &o : orders) {
      if (o == 0)
        ++g.free_rank;
      else
        g.torsion.push_back(o);
    }
    return g;
  }

  /// Reduced coordinates of the class of x in the quotient.
  IntVector classify(const IntVector &x) const {
    IntVector y = projection * x;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (orders[i] != 0) {
        y[i] %= orders[i];
        if (y[i] < 0)
          y[i] += orders[i];
      }
    return y;
  }
};

inline CokernelPresentation cokernel_presentation(const IntMatrix &a) {
  const auto d = snf(a);
  const std::size_t r = d.rank();
  CokernelPresentation p;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (i < r && d.D(i, i) == 1)
      continue;
    kept.push_back(i);
    p.orders.push_back(i < r ? d.D(i, i) : Integer(0));
  }
  p.projection = IntMatrix(kept.size(), a.rows());
  for (std::size_t k = 0; k < kept.size(); ++k)
    for (std::size_t j = 0; j < a.rows(); ++j)
      p.projection(k, j) = d.U(kept[k], j);
  return p;
}

/// Isomorphism type of Z^rows / colspan(A).
inline AbelianGroup cokernel(const IntMatrix &a) {
  return cokernel_presentation(a).group();
}

/// Columns form a lattice basis of {x in Z^cols : A x = 0}.
inline IntMatrix kernel_basis(const IntMatrix &a) {
  const auto d = snf(a);
  const std::size_t r = d.rank();
  IntMatrix k(a.cols(), a.cols() - r);
  for (std::size_t j = r; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.cols(); ++i)
      k(i, j - r) = d.V(i, j);
  return k;
}

/// Inverse of a unimodular matrix; throws ComputeError otherwise.
inline IntMatrix unimodular_inverse(const IntMatrix &a) {
  if (!a.square())
    throw ComputeError("inverse of a non-square matrix");
  const auto d = snf(a);
  for (std::size_t i = 0; i < a.rows(); ++i)
    if (d.D(i, i) != 1)
      throw ComputeError("matrix is not unimodular");
  return d.V * d.U;
}

/// Integer determinant by fraction-free (Bareiss) elimination.
inline Integer determinant(IntMatrix a) {
  if (!a.square())
    throw InputError("determinant of a non-square matrix");
  const std::size_t n = a.rows();
  if (n == 0)
    return 1;
  Integer sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && a(p, k) == 0)
        ++p;
      if (p == n)
        return 0;
      a.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

/// Rational determinant by Gaussian elimination.
inline Rational determinant(RatMatrix a) {
  if (!a.square())
    throw InputError("determinant of a non-square matrix");
  const std::size_t n = a.rows();
  Rational det = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a(p, k) == 0)
      ++p;
    if (p == n)
      return 0;
    if (p != k) {
      a.swap_rows(k, p);
      det = -det;
    }
    det *= a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a(i, k) == 0)
        continue;
      Rational q = a(i, k) / a(k, k);
      a.add_row(i, k, -q);
    }
  }
  return det;
}

/// All size-i subsets of {0..n-1} in lexicographic order.
inline std::vector<std::vector<std::size_t>> subsets(std::size_t n,
                                                     std::size_t i) {
  std::vector<std::vector<std::size_t>> out;
  if (i > n)
    return out;
  std::vector<std::size_t> s(i);
  std::iota(s.begin(), s.end(), std::size_t{0});
  for (;;) {
    out.push_back(s);
    std::size_t k = i;
    while (k > 0 && s[k - 1] == n - i + (k - 1))
      --k;
    if (k == 0)
      break;
    ++s[k - 1];
    for (std::size_t j = k; j < i; ++j)
      s[j] = s[j - 1] + 1;
  }
  return out;
}

/// Matrix of the i-th exterior power in the lexicographic basis of i-subsets.
inline IntMatrix exterior_power(const IntMatrix &a, std::size_t i) {
  if (!a.square())
    throw InputError("exterior power of a non-square matrix");
  if (i > a.rows())
    throw InputError("exterior power degree out of range");
  const auto basis = subsets(a.rows(), i);
  IntMatrix out(basis.size(), basis.size());
  for (std::size_t r = 0; r < basis.size(); ++r)
    for (std::size_t c = 0; c < basis.size(); ++c) {
      IntMatrix minor(i, i);
      for (std::size_t x = 0; x < i; ++x)
        for (std::size_t y = 0; y < i; ++y)
          minor(x, y) = a(basis[r][x], basis[c][y]);
      out(r, c) = determinant(std::move(minor));
    }
  return out;
}

/// Representative of x modulo m in [0, m); m == 0 leaves x unchanged.
inline Integer reduce_mod(const Integer &x, const Integer &m) {
  if (m == 0)
    return x;
  Integer r = x % m;
  if (r < 0)
    r += m;
  return r;
}

/// Solves g * r == v (mod m) for a unit g mod m; with m == 0 requires g = +-1.
inline Integer divide_mod(const Integer &v, const Integer &g,
                          const Integer &m) {
  if (m == 0) {
    if (g == 1)
      return v;
    if (g == -1)
      return -v;
    throw ComputeError("generator of a free summand must be primitive");
  }
  if (m == 1)
    return 0;
  // extended Euclid on (g mod m, m)
  Integer a = reduce_mod(g, m), b = m, x0 = 1, x1 = 0;
  while (b != 0) {
    Integer q = a / b;
    Integer t = a - q * b;
    a = b;
    b = t;
    t = x0 - q * x1;
    x0 = x1;
    x1 = t;
  }
  if (a != 1)
    throw ComputeError("element does not generate the cyclic group");
  return reduce_mod(x0 * v, m);
}

} // namespace ctrace
