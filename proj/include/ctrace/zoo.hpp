#pragma once

// Standard closed oriented manifolds and maps between them.

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "ctrace/graded_ring.hpp"

namespace ctrace::zoo {

/// S^n with H^0 = Z{1}, H^n = Z{u}.
inline ModelPtr sphere(int n) {
  if (n < 1)
    throw InputError("sphere dimension must be positive");
  return ModelBuilder("S" + std::to_string(n), n)
      .free(0, "1")
      .free(n, "u")
      .orientation("u", 1)
      .build();
}

inline std::string power_label(const std::string &x, int j) {
  if (j == 0)
    return "1";
  return j == 1 ? x : x + "^" + std::to_string(j);
}

/// CP^n = Z[x]/(x^{n+1}), |x| = 2, <x^n, [CP^n]> = 1.
inline ModelPtr complex_projective(int n) {
  if (n < 1)
    throw InputError("CP^n needs n >= 1");
  ModelBuilder b("CP" + std::to_string(n), 2 * n);
  for (int j = 0; j <= n; ++j)
    b.free(2 * j, power_label("x", j));
  for (int i = 1; i <= n; ++i)
    for (int j = 1; i + j <= n; ++j)
      b.product(power_label("x", i), power_label("x", j),
                {{power_label("x", i + j), 1}});
  return b.orientation(power_label("x", n), 1).build();
}

inline std::string subset_label(const std::vector<std::size_t> &s) {
  if (s.empty())
    return "1";
  std::string out;
  for (auto i : s)
    out += "e" + std::to_string(i + 1);
  return out;
}

/// T^k as the exterior algebra on e1..ek; degree-d basis is the
/// lexicographic list of d-subsets, oriented by e1...ek.
inline ModelPtr torus(int k) {
  if (k < 1)
    throw InputError("torus dimension must be positive");
  const auto n = static_cast<std::size_t>(k);
  ModelBuilder b("T" + std::to_string(k), k);
  for (std::size_t d = 0; d <= n; ++d)
    for (const auto &s : subsets(n, d))
      b.free(static_cast<int>(d), subset_label(s));
  for (std::size_t p = 1; p <= n; ++p)
    for (const auto &s : subsets(n, p))
      for (std::size_t q = 1; p + q <= n; ++q)
        for (const auto &t : subsets(n, q)) {
          std::vector<std::size_t> u = s;
          u.insert(u.end(), t.begin(), t.end());
          // sign of the sorting permutation; zero if s and t overlap
          int sign = 1;
          bool overlap = false;
          for (std::size_t i = 0; i < u.size(); ++i)
            for (std::size_t j = i + 1; j < u.size(); ++j) {
              if (u[i] == u[j])
                overlap = true;
              else if (u[i] > u[j])
                sign = -sign;
            }
          if (overlap)
            continue;
          std::sort(u.begin(), u.end());
          b.product(subset_label(s), subset_label(t),
                    {{subset_label(u), sign}});
        }
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return b.orientation(subset_label(all), 1).build();
}

/// Closed orientable surface of genus g: a_i b_i = w = -b_i a_i.
inline ModelPtr surface(int genus) {
  if (genus < 0)
    throw InputError("genus must be nonnegative");
  if (genus == 0)
    return sphere(2);
  ModelBuilder b("Sigma" + std::to_string(genus), 2);
  b.free(0, "1");
  for (int i = 1; i <= genus; ++i) {
    b.free(1, "a" + std::to_string(i));
    b.free(1, "b" + std::to_string(i));
  }
  b.free(2, "w");
  for (int i = 1; i <= genus; ++i) {
    const auto a = "a" + std::to_string(i), c = "b" + std::to_string(i);
    b.product(a, c, {{"w", 1}});
    b.product(c, a, {{"w", -1}});
  }
  return b.orientation("w", 1).build();
}

/// Self-map of S^n of the given degree.
inline RingMap sphere_map(const ModelPtr &s, const Integer &degree) {
  const int n = s->dimension();
  std::vector<IntMatrix> mats(static_cast<std::size_t>(n) + 1);
  for (int d = 0; d <= n; ++d)
    mats[static_cast<std::size_t>(d)] = IntMatrix(s->rank(d), s->rank(d));
  mats[0](0, 0) = 1;
  mats[static_cast<std::size_t>(n)](0, 0) = degree;
  return {"deg" + degree.str(), s, s, std::move(mats)};
}

/// Self-map of CP^n with x -> a x (degree a^n).
inline RingMap cpn_map(const ModelPtr &cp, const Integer &a) {
  const int n = cp->dimension() / 2;
  std::vector<IntMatrix> mats;
  Integer power = 1;
  for (int d = 0; d <= 2 * n; ++d) {
    IntMatrix m(cp->rank(d), cp->rank(d));
    if (d % 2 == 0) {
      m(0, 0) = power;
      power *= a;
    }
    mats.push_back(std::move(m));
  }
  return {"x->" + a.str() + "x", cp, cp, std::move(mats)};
}

/// Map of tori induced by a linear map; `degree_one` sends degree-1
/// coordinates of the source torus to those of the target torus and the
/// higher degrees are its compound matrices.
inline RingMap torus_map(const ModelPtr &source, const ModelPtr &target,
                         const IntMatrix &degree_one) {
  const auto ns = static_cast<std::size_t>(source->dimension());
  const auto nt = static_cast<std::size_t>(target->dimension());
  if (degree_one.rows() != nt || degree_one.cols() != ns)
    throw InputError("torus map matrix has the wrong shape");
  std::vector<IntMatrix> mats;
  for (std::size_t d = 0; d <= ns; ++d) {
    const auto rows = subsets(nt, d), cols = subsets(ns, d);
    IntMatrix m(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < cols.size(); ++c) {
        IntMatrix minor(d, d);
        for (std::size_t x = 0; x < d; ++x)
          for (std::size_t y = 0; y < d; ++y)
            minor(x, y) = degree_one(rows[r][x], cols[c][y]);
        m(r, c) = determinant(std::move(minor));
      }
    mats.push_back(std::move(m));
  }
  return {"linear", source, target, std::move(mats)};
}

/// Map of genus-g surfaces acting on H^1 by `h1` (must preserve the
/// intersection form up to the factor `top`, the action on H^2).
inline RingMap surface_map(const ModelPtr &sigma, const IntMatrix &h1,
                           const Integer &top) {
  std::vector<IntMatrix> mats{IntMatrix::identity(1), h1, IntMatrix{{top}}};
  return {"surface", sigma, sigma, std::move(mats)};
}

/// Projection M1 x M2 -> M_i as a ring map into the tensor model.
inline RingMap projection(const ModelPtr &left, const ModelPtr &right,
                          int which) {
  auto prod = tensor_model(left, right);
  const auto &factor = which == 0 ? left : right;
  std::vector<IntMatrix> mats;
  for (int d = 0; d <= factor->dimension(); ++d) {
    const auto layout = tensor_layout(*left, *right, d);
    IntMatrix m(layout.size(), factor->rank(d));
    for (std::size_t r = 0; r < layout.size(); ++r) {
      auto [p, i, j] = layout[r];
      if (which == 0 && p == d && j == 0)
        m(r, i) = 1;
      if (which == 1 && p == 0 && i == 0)
        m(r, j) = 1;
    }
    mats.push_back(std::move(m));
  }
  return {which == 0 ? "pr1" : "pr2", factor, prod, std::move(mats)};
}

/// Every model of the standard zoo.
inline std::vector<ModelPtr> standard_models() {
  std::vector<ModelPtr> out;
  for (int n = 1; n <= 6; ++n)
    out.push_back(sphere(n));
  for (int n = 1; n <= 4; ++n)
    out.push_back(complex_projective(n));
  out.push_back(torus(2));
  out.push_back(torus(3));
  for (int g = 1; g <= 3; ++g)
    out.push_back(surface(g));
  out.push_back(tensor_model(sphere(2), sphere(2)));
  out.push_back(tensor_model(sphere(1), sphere(3)));
  out.push_back(tensor_model(complex_projective(1), sphere(3)));
  return out;
}

} // namespace ctrace::zoo
