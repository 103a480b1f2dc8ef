#pragma once

// Lefschetz numbers, the coincidence primary-obstruction class and its
// homological images, and indices of linear germs.

#include <vector>

#include "ctrace/exact_linalg.hpp"
#include "ctrace/graded_ring.hpp"

namespace ctrace {

/// Matrices H_i(f) of a self-map in every degree i = 0..m.
struct SelfMapHomology {
  std::vector<IntMatrix> degrees;
};

/// Sum over i of (-1)^i tr H_i(f).
inline Integer lefschetz_number(const SelfMapHomology &f) {
  Integer total = 0;
  for (std::size_t i = 0; i < f.degrees.size(); ++i) {
    const auto &M = f.degrees[i];
    if (!M.square())
      throw InputError("H_" + std::to_string(i) + "(f) is not square");
    total += (i % 2 == 0 ? 1 : -1) * M.trace();
  }
  return total;
}

/// Rational homology of a self-map, read off its ring map: on the free part
/// H_i(f) is the transpose of H^i(f).
inline SelfMapHomology self_map_homology(const RingMap &f) {
  if (!same_model(f.source(), f.target()))
    throw InputError("'" + f.name() + "' is not a self-map");
  const auto &m = *f.source();
  SelfMapHomology h;
  for (int d = 0; d <= m.dimension(); ++d) {
    const auto r = m.free_rank(d);
    IntMatrix M(r, r);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j)
        M(i, j) = f.matrix(d)(j, i);
    h.degrees.push_back(std::move(M));
  }
  return h;
}

namespace detail {

inline void check_pair(const RingMap &f, const RingMap &g) {
  if (!same_model(f.source(), g.source()) ||
      !same_model(f.target(), g.target()))
    throw InputError("'" + f.name() + "' and '" + g.name() +
                     "' must share source and target");
  if (f.target()->dimension() < f.source()->dimension())
    throw ComputeError("coincidence class needs dim M >= dim N");
}

} // namespace detail

/// Poincaré dual of the image of the Reidemeister trace in H_{m-n}(M):
/// the sum over a homogeneous basis b_i of H^*(N) of
/// (-1)^{|b_i|} f^*(b^i) ∪ g^*(b_i).
inline CohomologyClass coincidence_class(const RingMap &f, const RingMap &g) {
  detail::check_pair(f, g);
  const auto &N = f.source();
  const int n = N->dimension();
  auto total = CohomologyClass::zero(f.target(), n);
  for (int d = 0; d <= n; ++d) {
    const auto duals = dual_basis(N, d);
    for (std::size_t i = 0; i < N->rank(d); ++i) {
      IntVector e(N->rank(d), Integer(0));
      e[i] = 1;
      auto term = cup(pullback(f, duals.duals[i]),
                      pullback(g, CohomologyClass(N, d, std::move(e))));
      total += Integer(d % 2 == 0 ? 1 : -1) * term;
    }
  }
  return total;
}

/// The class u of degree n with <u, [N]> = 1.
inline CohomologyClass orientation_class(const ModelPtr &N) {
  const auto &o = N->orientation();
  if (!N->oriented_closed() || o.size() != 1 || (o[0] != 1 && o[0] != -1))
    throw ComputeError("'" + N->name() +
                       "' needs a top class evaluating to +-1");
  return {N, N->dimension(), IntVector{o[0]}};
}

/// chi(N) f^*(u); the target of f may have torsion.
inline CohomologyClass self_coincidence_class(const RingMap &f) {
  return euler_characteristic(*f.source()) *
         pullback(f, orientation_class(f.source()));
}

struct CoincidenceReport {
  CohomologyClass primary_class; // in H^n(M)
  HomologyClass lambda_N;        // in H_{m-n}(N)
  HomologyClass rho_image_M;     // in H_{m-n}(M)
  bool nonzero = false;
};

inline CoincidenceReport coincidence_report(const RingMap &f,
                                            const RingMap &g) {
  auto primary = coincidence_class(f, g);
  auto rho = poincare_dual(primary);
  auto lambda = homology_pushforward(f, rho);
  const bool nonzero = !primary.is_zero();
  return {std::move(primary), std::move(lambda), std::move(rho), nonzero};
}

/// Sign of det(Psi - Phi): local coincidence index of the linear germs.
inline int linear_coincidence_index(const RatMatrix &phi,
                                    const RatMatrix &psi) {
  if (!phi.square() || phi.rows() != psi.rows() || phi.cols() != psi.cols())
    throw InputError("germ matrices must be square of equal size");
  const Rational det = determinant(psi - phi);
  if (det == 0)
    throw ComputeError("singular difference: coincidence is not isolated");
  return det > 0 ? 1 : -1;
}

/// Sign of det(I - A): index of the isolated fixed point of x -> A x.
inline int linear_fixed_point_index(const RatMatrix &a) {
  if (!a.square())
    throw InputError("germ matrix must be square");
  const Rational det = determinant(RatMatrix::identity(a.rows()) - a);
  if (det == 0)
    throw ComputeError("det(I - A) = 0: fixed point is not isolated");
  return det > 0 ? 1 : -1;
}

} // namespace ctrace
