#pragma once

// Two-row homology Serre spectral sequences, the Gysin sequence of a circle
// bundle, and the self-coincidence trace of circle bundles over CP^n.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctrace/coincidence.hpp"
#include "ctrace/exact_linalg.hpp"
#include "ctrace/graded_ring.hpp"
#include "ctrace/zoo.hpp"

namespace ctrace {

/// E^2 of a fibration with free base homology and fiber homology Z in
/// degree 0 and Z^s in degree 1.
///
/// Coordinates on E^2_{p,1} = H_p(B) ⊗ H_1(F) are ordered base-major:
/// index i * s + j for base generator i and fiber generator j.
struct TwoRowE2 {
  std::vector<std::size_t> base_ranks;   // free rank of H_p(B), p = 0..P
  std::vector<std::string> fiber_labels; // basis of H_1(F)
  std::map<int, IntMatrix> d2;           // column p >= 2; absent means zero

  std::size_t fiber_rank() const { return fiber_labels.size(); }
  int top() const { return static_cast<int>(base_ranks.size()) - 1; }
  std::size_t rank(int p) const {
    return p < 0 || p > top() ? 0 : base_ranks[static_cast<std::size_t>(p)];
  }
  /// d^2: E^2_{p,0} -> E^2_{p-2,1}, zero when not given.
  IntMatrix differential(int p) const {
    auto it = d2.find(p);
    if (it != d2.end())
      return it->second;
    return IntMatrix(rank(p - 2) * fiber_rank(), rank(p));
  }
};

struct TwoRowResult {
  struct TotalDegree {
    AbelianGroup bottom; // E^inf_{i,0}
    AbelianGroup top;    // E^inf_{i-1,1}
    std::optional<AbelianGroup> resolved;
  };

  std::map<std::pair<int, int>, AbelianGroup> e_infinity;
  std::map<int, IntMatrix> cycles;                  // kernel basis at (p,0)
  std::map<int, CokernelPresentation> fiber_row;    // quotient at (p,1)
  std::vector<TotalDegree> total;                   // i = 0..P+1
};

/// E^3 = E^inf of a two-row sequence: only d^2 (p,0) -> (p-2,1) can act.
inline TwoRowResult two_row_homology(const TwoRowE2 &e2) {
  const int P = e2.top();
  if (P < 0)
    throw InputError("two-row E2 needs a nonempty base");
  const std::size_t s = e2.fiber_rank();
  for (const auto &[p, M] : e2.d2) {
    if (p < 2 || p > P)
      throw InputError("d2 given on column " + std::to_string(p) +
                       " outside [2, " + std::to_string(P) + "]");
    if (M.rows() != e2.rank(p - 2) * s || M.cols() != e2.rank(p))
      throw InputError("d2 on column " + std::to_string(p) +
                       " must be " + std::to_string(e2.rank(p - 2) * s) +
                       "x" + std::to_string(e2.rank(p)));
  }

  TwoRowResult out;
  for (int p = 0; p <= P; ++p) {
    auto cycles = kernel_basis(e2.differential(p));
    out.e_infinity[{p, 0}] = AbelianGroup{cycles.cols(), {}};
    out.cycles[p] = std::move(cycles);

    auto quotient = cokernel_presentation(e2.differential(p + 2));
    out.e_infinity[{p, 1}] = quotient.group();
    out.fiber_row[p] = std::move(quotient);
  }
  for (int i = 0; i <= P + 1; ++i) {
    TwoRowResult::TotalDegree t;
    if (i <= P)
      t.bottom = out.e_infinity[{i, 0}];
    if (i >= 1)
      t.top = out.e_infinity[{i - 1, 1}];
    // The bottom row is a lattice, so the filtration of H_i splits.
    t.resolved = t.bottom + t.top;
    out.total.push_back(std::move(t));
  }
  return out;
}

namespace detail {

/// Matrix of c -> e ∪ c from H^d(B) to H^{d+2}(B).
inline IntMatrix euler_multiplication(const ModelPtr &B,
                                      const CohomologyClass &e, int d) {
  IntMatrix M(B->rank(d + 2), B->rank(d));
  if (d < 0 || d > B->dimension())
    return M;
  for (std::size_t j = 0; j < B->rank(d); ++j) {
    IntVector v(B->rank(d), Integer(0));
    v[j] = 1;
    auto prod = cup(e, CohomologyClass(B, d, std::move(v)));
    for (std::size_t i = 0; i < prod.coeffs().size(); ++i)
      M(i, j) = prod[i];
  }
  return M;
}

/// Relation matrix diag(orders) of the torsion coordinates in degree d.
inline IntMatrix torsion_relations(const CohomologyModel &B, int d) {
  const auto &b = B.basis(d);
  IntMatrix R(b.size(), b.torsion.size());
  for (std::size_t t = 0; t < b.torsion.size(); ++t)
    R(b.free.size() + t, t) = b.torsion[t].order;
  return R;
}

inline IntMatrix hconcat(const IntMatrix &a, const IntMatrix &b) {
  IntMatrix c(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j)
      c(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j)
      c(i, a.cols() + j) = b(i, j);
  }
  return c;
}

/// Group L / span(R) where L is spanned by the columns of `spanning` and the
/// columns of `relations` lie in L.
inline AbelianGroup lattice_quotient(const IntMatrix &spanning,
                                     const IntMatrix &relations) {
  const auto d = snf(spanning);
  const std::size_t r = d.rank();
  IntMatrix coords(r, relations.cols());
  for (std::size_t c = 0; c < relations.cols(); ++c) {
    const auto w = d.U * relations.column(c);
    for (std::size_t i = 0; i < r; ++i) {
      if (w[i] % d.D(i, i) != 0)
        throw ComputeError("relation outside the lattice");
      coords(i, c) = w[i] / d.D(i, i);
    }
  }
  return cokernel(coords);
}

} // namespace detail

/// Pieces of H^i(E) from the Gysin sequence of the circle bundle with Euler
/// class e: 0 -> coker(e∪: H^{i-2} -> H^i) -> H^i(E) -> ker(e∪: H^{i-1} ->
/// H^{i+1}) -> 0.
struct GysinResult {
  struct Degree {
    AbelianGroup cokernel_piece;
    AbelianGroup kernel_piece;
    std::optional<AbelianGroup> resolved;
  };
  int dimension = 0; // dim B + 1
  std::vector<Degree> degrees;
};

inline GysinResult gysin_cohomology(const ModelPtr &B,
                                    const CohomologyClass &e) {
  if (e.degree() != 2)
    throw InputError("Euler class must have degree 2");
  if (!same_model(B, e.model()))
    throw InputError("Euler class does not live on the base");
  GysinResult out;
  out.dimension = B->dimension() + 1;
  for (int i = 0; i <= out.dimension; ++i) {
    GysinResult::Degree g;
    // cokernel of e∪ into H^i, including the torsion relations of H^i
    g.cokernel_piece = cokernel(
        detail::hconcat(detail::euler_multiplication(B, e, i - 2),
                        detail::torsion_relations(*B, i)));
    // kernel of e∪ on H^{i-1}: {x : e x ∈ torsion span} modulo torsion span
    const auto E = detail::euler_multiplication(B, e, i - 1);
    const auto RB = detail::torsion_relations(*B, i + 1);
    const auto RA = detail::torsion_relations(*B, i - 1);
    const auto K = kernel_basis(detail::hconcat(E, -RB));
    IntMatrix lifts(E.cols(), K.cols());
    for (std::size_t c = 0; c < K.cols(); ++c)
      for (std::size_t r = 0; r < E.cols(); ++r)
        lifts(r, c) = K(r, c);
    g.kernel_piece = detail::lattice_quotient(lifts, RA);
    if (g.kernel_piece.is_zero() || g.cokernel_piece.is_zero() ||
        g.kernel_piece.is_free())
      g.resolved = g.cokernel_piece + g.kernel_piece;
    out.degrees.push_back(std::move(g));
  }
  return out;
}

/// Cohomology ring of the circle bundle E -> B with Euler class e, together
/// with the projection p^*: H^*(B) -> H^*(E).
struct CircleBundle {
  ModelPtr total;
  RingMap projection;
};

/// Builds H^*(E) for a torsion-free oriented base. Degree-i generators are
/// the classes [b] spanning coker(e∪) and lifts s[c] of a basis c of
/// ker(e∪), with s[c] · [a] = s[c a]. Products of two lifts are taken to be
/// zero, which is only justified when e = 0 or they land above dim E;
/// other cases throw ComputeError.
inline CircleBundle circle_bundle(const ModelPtr &B, const CohomologyClass &e,
                                  std::string name = {}) {
  require_poincare(*B, "circle bundle model");
  if (e.degree() != 2 || !same_model(B, e.model()))
    throw InputError("Euler class must be a degree-2 class of the base");
  const int m = B->dimension();
  const int dim = m + 1;
  if (name.empty())
    name = "E(" + B->name() + "," + e.to_string() + ")";

  struct Quotient {
    CokernelPresentation pres;
    IntMatrix reps; // columns: representatives of the generators in H^d(B)
  };
  struct Lifts {
    IntMatrix basis; // columns: kernel basis in H^{d-1}(B)
    IntMatrix snf_u; // for coordinates inside the kernel lattice
  };
  std::vector<Quotient> quot(static_cast<std::size_t>(dim) + 1);
  std::vector<Lifts> lifts(static_cast<std::size_t>(dim) + 1);
  std::vector<std::vector<std::string>> qlabels(quot.size()),
      llabels(quot.size());

  auto single = [](const IntVector &v) -> std::optional<std::size_t> {
    std::optional<std::size_t> at;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] == 0)
        continue;
      if (v[i] != 1 || at)
        return std::nullopt;
      at = i;
    }
    return at;
  };

  ModelBuilder builder(name, dim);
  for (int d = 0; d <= dim; ++d) {
    auto &q = quot[static_cast<std::size_t>(d)];
    q.pres = cokernel_presentation(detail::euler_multiplication(B, e, d - 2));
    // representatives: columns of U^{-1} for the kept summands
    const auto dec = snf(detail::euler_multiplication(B, e, d - 2));
    const auto Uinv = unimodular_inverse(dec.U);
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < B->rank(d); ++i)
      if (!(i < dec.rank() && dec.D(i, i) == 1))
        kept.push_back(i);
    q.reps = IntMatrix(B->rank(d), kept.size());
    for (std::size_t c = 0; c < kept.size(); ++c)
      for (std::size_t r = 0; r < B->rank(d); ++r)
        q.reps(r, c) = Uinv(r, kept[c]);

    auto &l = lifts[static_cast<std::size_t>(d)];
    l.basis = kernel_basis(detail::euler_multiplication(B, e, d - 1));
    l.snf_u = snf(l.basis).U;

    for (std::size_t c = 0; c < q.reps.cols(); ++c) {
      auto at = single(q.reps.column(c));
      std::string lab = at ? "[" + B->basis(d).label(*at) + "]"
                           : "[g" + std::to_string(d) + "." +
                                 std::to_string(c) + "]";
      qlabels[static_cast<std::size_t>(d)].push_back(lab);
    }
    for (std::size_t c = 0; c < l.basis.cols(); ++c) {
      auto at = single(l.basis.column(c));
      std::string lab = at ? "s[" + B->basis(d - 1).label(*at) + "]"
                           : "s[k" + std::to_string(d) + "." +
                                 std::to_string(c) + "]";
      llabels[static_cast<std::size_t>(d)].push_back(lab);
    }
    // free summands first, matching the basis layout
    const auto &orders = q.pres.orders;
    for (std::size_t c = 0; c < orders.size(); ++c)
      if (orders[c] == 0)
        builder.free(d, qlabels[static_cast<std::size_t>(d)][c]);
    for (const auto &lab : llabels[static_cast<std::size_t>(d)])
      builder.free(d, lab);
    for (std::size_t c = 0; c < orders.size(); ++c)
      if (orders[c] != 0)
        builder.torsion(d, qlabels[static_cast<std::size_t>(d)][c],
                        orders[c]);
  }

  // coordinates of a vector of H^{d-1}(B) lying in the kernel lattice
  auto lift_coords = [&](int d, const IntVector &v) {
    const auto &l = lifts[static_cast<std::size_t>(d)];
    const auto dec = snf(l.basis);
    const auto w = dec.U * v;
    IntVector y(l.basis.cols(), Integer(0));
    for (std::size_t i = 0; i < dec.rank(); ++i) {
      if (w[i] % dec.D(i, i) != 0)
        throw ComputeError("product leaves the kernel lattice");
      y[i] = w[i] / dec.D(i, i);
    }
    for (std::size_t i = dec.rank(); i < w.size(); ++i)
      if (w[i] != 0)
        throw ComputeError("product leaves the kernel lattice");
    return dec.V * y;
  };
  auto quot_terms = [&](int d, const IntVector &v) {
    ModelBuilder::Terms t;
    if (d > dim)
      return t;
    const auto &q = quot[static_cast<std::size_t>(d)];
    const auto y = q.pres.classify(v);
    for (std::size_t c = 0; c < y.size(); ++c)
      if (y[c] != 0)
        t.emplace_back(qlabels[static_cast<std::size_t>(d)][c], y[c]);
    return t;
  };
  auto lift_terms = [&](int d, const IntVector &v) {
    ModelBuilder::Terms t;
    if (d > dim)
      return t;
    const auto y = lift_coords(d, v);
    for (std::size_t c = 0; c < y.size(); ++c)
      if (y[c] != 0)
        t.emplace_back(llabels[static_cast<std::size_t>(d)][c], y[c]);
    return t;
  };
  auto base_product = [&](int p, const IntVector &a, int q,
                          const IntVector &b) {
    return cup(CohomologyClass(B, p, a), CohomologyClass(B, q, b)).coeffs();
  };

  const bool e_zero = e.is_zero();
  for (int p = 0; p <= dim; ++p)
    for (int q = 0; p + q <= dim; ++q) {
      const auto &Qp = quot[static_cast<std::size_t>(p)];
      const auto &Qq = quot[static_cast<std::size_t>(q)];
      const auto &Lp = lifts[static_cast<std::size_t>(p)];
      const auto &Lq = lifts[static_cast<std::size_t>(q)];
      const int d = p + q;
      for (std::size_t i = 0; i < Qp.reps.cols(); ++i)
        for (std::size_t j = 0; j < Qq.reps.cols(); ++j) {
          if (p == 0 || q == 0)
            continue;
          auto terms = quot_terms(
              d, base_product(p, Qp.reps.column(i), q, Qq.reps.column(j)));
          if (!terms.empty())
            builder.product(qlabels[static_cast<std::size_t>(p)][i],
                            qlabels[static_cast<std::size_t>(q)][j],
                            std::move(terms));
        }
      // s[c] [a] = s[c a];  [a] s[c] = (-1)^{|a|} s[a c]
      for (std::size_t i = 0; i < Lp.basis.cols(); ++i)
        for (std::size_t j = 0; j < Qq.reps.cols(); ++j) {
          if (q == 0)
            continue;
          const auto ca =
              base_product(p - 1, Lp.basis.column(i), q, Qq.reps.column(j));
          auto terms = lift_terms(d, ca);
          if (!terms.empty())
            builder.product(llabels[static_cast<std::size_t>(p)][i],
                            qlabels[static_cast<std::size_t>(q)][j],
                            std::move(terms));
        }
      for (std::size_t i = 0; i < Qp.reps.cols(); ++i)
        for (std::size_t j = 0; j < Lq.basis.cols(); ++j) {
          if (p == 0)
            continue;
          auto ac =
              base_product(p, Qp.reps.column(i), q - 1, Lq.basis.column(j));
          if (p % 2 == 1)
            for (auto &x : ac)
              x = -x;
          auto terms = lift_terms(d, ac);
          if (!terms.empty())
            builder.product(qlabels[static_cast<std::size_t>(p)][i],
                            llabels[static_cast<std::size_t>(q)][j],
                            std::move(terms));
        }
      if (!e_zero && Lp.basis.cols() > 0 && Lq.basis.cols() > 0)
        throw ComputeError("products of fiber lifts in degree " +
                           std::to_string(d) +
                           " are not determined by the Gysin sequence");
    }

  // orientation: s[u] with <u, [B]> = +-1
  const auto u = orientation_class(B);
  const auto top = lift_coords(dim, u.coeffs());
  std::optional<std::size_t> at;
  for (std::size_t c = 0; c < top.size(); ++c)
    if (top[c] != 0)
      at = c;
  if (!at)
    throw ComputeError("top class of the base does not lift");
  builder.orientation(llabels[static_cast<std::size_t>(dim)][*at], top[*at]);
  auto total = builder.build();

  // p^*: [b] coordinates in the quotient part, zero on the lifts
  std::vector<IntMatrix> mats;
  for (int d = 0; d <= m; ++d) {
    IntMatrix M(total->rank(d), B->rank(d));
    for (std::size_t j = 0; j < B->rank(d); ++j) {
      IntVector v(B->rank(d), Integer(0));
      v[j] = 1;
      for (const auto &[lab, coef] : quot_terms(d, v)) {
        auto ref = total->find(lab);
        M(ref->index, j) = coef;
      }
    }
    mats.push_back(std::move(M));
  }
  RingMap proj("p", B, total, std::move(mats));
  return {std::move(total), std::move(proj)};
}

/// Outcome of the self-coincidence trace of p^k_n: E^k_n -> CP^n.
struct S1BundleReport {
  int n = 0;
  Integer k = 0;
  AbelianGroup h1_hoeq;     // H_1 of the homotopy equalizer
  Integer trace = 0;        // multiple of [a]; read mod k when k != 0
  bool nonzero = false;
  int nielsen_tilde = 0;
  int nielsen = 0;
  bool trivial_bundle = false; // k == 0: trace lives in Z
  Integer gysin_residue = 0;   // chi(CP^n) p^*(x^n) as a multiple of p^*(x^n)
  bool gysin_nonzero = false;
};

namespace detail {

/// r with `value` == r * `generator` in a cyclic subgroup of a quotient
/// with the given summand orders; r is reduced modulo the order of the
/// generator.
inline Integer multiple_of(const IntVector &value, const IntVector &generator,
                           const std::vector<Integer> &orders) {
  std::optional<std::size_t> pivot;
  for (std::size_t i = 0; i < generator.size(); ++i)
    if (generator[i] != 0) {
      pivot = i;
      break;
    }
  if (!pivot) {
    for (const auto &x : value)
      if (x != 0)
        throw ComputeError("class is not a multiple of the zero generator");
    return 0;
  }
  // order of the generator: lcm over its coordinates
  Integer order = 1;
  bool infinite = false;
  for (std::size_t i = 0; i < generator.size(); ++i) {
    if (generator[i] == 0)
      continue;
    if (orders[i] == 0) {
      infinite = true;
      continue;
    }
    const Integer o = orders[i] / gcd(orders[i], generator[i]);
    order = order / gcd(order, o) * o;
  }
  Integer r;
  if (infinite) {
    std::size_t free_at = *pivot;
    for (std::size_t i = 0; i < generator.size(); ++i)
      if (generator[i] != 0 && orders[i] == 0) {
        free_at = i;
        break;
      }
    if (value[free_at] % generator[free_at] != 0)
      throw ComputeError("class is not a multiple of the generator");
    r = value[free_at] / generator[free_at];
  } else {
    // t * g == v (mod o) on the pivot coordinate, then filter candidates
    const Integer &g = generator[*pivot], &o = orders[*pivot];
    const Integer h = gcd(reduce_mod(g, o), o);
    if (reduce_mod(value[*pivot], h) != 0)
      throw ComputeError("class is not a multiple of the generator");
    const Integer step = o / h;
    const Integer t0 =
        step == 1 ? Integer(0)
                  : divide_mod(value[*pivot] / h, g / h, step);
    r = -1;
    for (Integer j = 0; j < h && r < 0; ++j) {
      const Integer t = t0 + j * step;
      bool ok = true;
      for (std::size_t i = 0; i < generator.size() && ok; ++i)
        ok = reduce_mod(t * generator[i] - value[i], orders[i]) == 0;
      if (ok)
        r = reduce_mod(t, order);
    }
    if (r < 0)
      throw ComputeError("class is not a multiple of the generator");
  }
  for (std::size_t i = 0; i < generator.size(); ++i)
    if (reduce_mod(r * generator[i] - value[i], orders[i]) != 0)
      throw ComputeError("class is not a multiple of the generator");
  return r;
}

} // namespace detail

/// E^2 of Hoeq(p^k_n, p^k_n) -> CP^n: fiber H_1 = Z{a, b}, d^2 = (k, 0)
/// on every even column.
inline TwoRowE2 hoeq_e2(int n, const Integer &k) {
  TwoRowE2 e2;
  e2.base_ranks.assign(static_cast<std::size_t>(2 * n) + 1, 0);
  for (int j = 0; j <= n; ++j)
    e2.base_ranks[static_cast<std::size_t>(2 * j)] = 1;
  e2.fiber_labels = {"a", "b"};
  for (int p = 2; p <= 2 * n; p += 2)
    e2.d2[p] = IntMatrix{{k}, {0}};
  return e2;
}

inline S1BundleReport s1_bundle_reidemeister(int n, const Integer &k) {
  if (n < 1)
    throw InputError("n must be at least 1");
  if (k < 0)
    throw InputError("k must be nonnegative");
  S1BundleReport rep;
  rep.n = n;
  rep.k = k;
  rep.trivial_bundle = k == 0;

  // spectral-sequence route
  const auto ss = two_row_homology(hoeq_e2(n, k));
  rep.h1_hoeq = *ss.total[1].resolved;
  const auto &fiber0 = ss.fiber_row.at(0);
  // the shriek image of the fundamental class is (n+1) x^n ⊗ a in E_{0,1}
  const IntVector a{1, 0};
  const IntVector trace_vec{Integer(n + 1), 0};
  const auto a_class = fiber0.classify(a);
  const auto trace_class = fiber0.classify(trace_vec);
  rep.trace = detail::multiple_of(trace_class, a_class, fiber0.orders);
  rep.nonzero = false;
  for (const auto &x : trace_class)
    rep.nonzero = rep.nonzero || x != 0;
  rep.nielsen_tilde = rep.nonzero ? 1 : 0; // Hoeq is path-connected
  rep.nielsen = rep.nielsen_tilde;

  // Gysin route: chi(CP^n) p^*(x^n) on the cohomology of E^k_n
  const auto base = zoo::complex_projective(n);
  const auto bundle =
      circle_bundle(base, k * CohomologyClass::generator(base, "x"),
                    "E" + k.str() + "_" + std::to_string(n));
  const auto obstruction = self_coincidence_class(bundle.projection);
  const auto gen = pullback(bundle.projection, orientation_class(base));
  std::vector<Integer> orders;
  const auto &top = bundle.total->basis(2 * n);
  for (std::size_t i = 0; i < top.size(); ++i)
    orders.push_back(top.order(i));
  rep.gysin_residue =
      detail::multiple_of(obstruction.coeffs(), gen.coeffs(), orders);
  rep.gysin_nonzero = !obstruction.is_zero();

  const Integer spectral =
      k == 0 ? rep.trace : reduce_mod(rep.trace, k);
  const Integer gysin =
      k == 0 ? rep.gysin_residue : reduce_mod(rep.gysin_residue, k);
  if (spectral != gysin || rep.nonzero != rep.gysin_nonzero)
    throw ComputeError("spectral and Gysin traces disagree for n=" +
                       std::to_string(n) + ", k=" + k.str());
  rep.trace = spectral;
  return rep;
}

/// Point-class coefficient of rho(id, id); equals chi(M).
inline Integer euler_from_diagonal(const ModelPtr &M) {
  const auto id = RingMap::identity(M);
  const auto rep = coincidence_report(id, id);
  const Integer value = rep.rho_image_M[0];
  if (value != euler_characteristic(*M))
    throw ComputeError("rho(id,id) of '" + M->name() +
                       "' disagrees with the Euler characteristic");
  return value;
}

} // namespace ctrace
