#pragma once

#include <cstdint>

#include "sensel/types.hpp"

namespace sensel {

// How the uncertainty sizes k0, k1 are derived for a generated instance.
struct KRule {
  enum Kind { infinity, drift, paper_det, explicit_k } kind = infinity;
  double fraction = 0.15;  // drift ceiling as a fraction of ||m1 - m0||
  double k0 = kInf, k1 = kInf;

  static KRule none() { return {}; }
  static KRule drift_fraction(double f = 0.15) {
    return {drift, f, kInf, kInf};
  }
  static KRule det_fraction(double f = 0.15) {
    return {paper_det, f, kInf, kInf};
  }
  static KRule fixed(double k0, double k1) {
    return {explicit_k, 0.15, k0, k1};
  }
};

// Random instance: standard-normal means, covariances A A' + 0.1 n I with
// standard-normal A; k per the rule. Deterministic for a given (n, seed).
// The drift rule uses k_i = lambda_max(S_i) / (f ||m1 - m0||)^2, which
// caps the Euclidean mean drift at f ||m1 - m0||; paper_det uses det(S_i)
// in place of lambda_max.
ProblemInstance generate_instance(int n, int p, std::uint64_t seed,
                                  const KRule& rule = {});

}  // namespace sensel
