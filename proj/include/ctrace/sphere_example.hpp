#pragma once

// Integral coincidence trace of a pair of maps S^m -> S^n.

#include "ctrace/error.hpp"
#include "ctrace/exact_linalg.hpp"

namespace ctrace {

/// Hopf invariants are taken as given: odd values are only realizable for
/// n in {2, 4, 8}, even values for every even n.
struct SphereCoincidenceInput {
  int m = 0;
  int n = 0;
  Integer hopf_f = 0;
  Integer hopf_g = 0;
};

enum class SphereRegime { trivial, hopf };

inline const char *to_string(SphereRegime r) {
  return r == SphereRegime::hopf ? "hopf" : "trivial";
}

struct SphereTraceReport {
  Integer trace_value = 0; // in H_{n-1}(ΩS^n) = Z, or 0
  SphereRegime regime = SphereRegime::trivial;
  int nielsen_tilde = 0;
  int nielsen = 0; // H_{m-n}(S^m) = 0 for m > n
};

inline SphereTraceReport sphere_reidemeister(const SphereCoincidenceInput &in) {
  if (in.n < 2 || in.m <= in.n)
    throw InputError("sphere example needs m > n >= 2");
  SphereTraceReport r;
  if (in.n % 2 == 0 && in.m == 2 * in.n - 1) {
    r.regime = SphereRegime::hopf;
    r.trace_value = in.hopf_f - in.hopf_g;
  }
  r.nielsen_tilde = r.trace_value != 0 ? 1 : 0;
  return r;
}

} // namespace ctrace
