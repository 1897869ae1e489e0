#include "sensel/instancegen.hpp"

#include <cmath>

#include "sensel/rng.hpp"

namespace sensel {

namespace {

MatrixXd random_cov(Rng& rng, int n) {
  MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
  MatrixXd S = A * A.transpose() + 0.1 * n * MatrixXd::Identity(n, n);
  return 0.5 * (S + S.transpose());
}

double k_of(const MatrixXd& S, double denom, bool use_det) {
  double num = use_det ? std::exp(detail::logdet_spd(S))
                       : detail::sym_eig(S).values.maxCoeff();
  return num / denom;
}

}  // namespace

ProblemInstance generate_instance(int n, int p, std::uint64_t seed,
                                  const KRule& rule) {
  if (n < 1 || p < 1 || p > n)
    throw std::invalid_argument("generate_instance: bad n/p");
  Rng rng(mix_seed(seed, 0x696E7374ULL, static_cast<std::uint64_t>(n)));
  ProblemInstance inst;
  inst.p = p;
  inst.pair.m0.resize(n);
  inst.pair.m1.resize(n);
  for (int i = 0; i < n; ++i) inst.pair.m0[i] = rng.normal();
  for (int i = 0; i < n; ++i) inst.pair.m1[i] = rng.normal();
  inst.pair.S0 = random_cov(rng, n);
  inst.pair.S1 = random_cov(rng, n);

  switch (rule.kind) {
    case KRule::infinity:
      break;
    case KRule::explicit_k:
      inst.uncertainty.k0 = rule.k0;
      inst.uncertainty.k1 = rule.k1;
      break;
    case KRule::drift:
    case KRule::paper_det: {
      double gap = (inst.pair.m1 - inst.pair.m0).norm();
      double denom = rule.fraction * gap;
      denom *= denom;
      if (denom <= 0)
        throw std::runtime_error("generate_instance: zero mean gap");
      bool det = rule.kind == KRule::paper_det;
      inst.uncertainty.k0 = k_of(inst.pair.S0, denom, det);
      inst.uncertainty.k1 = k_of(inst.pair.S1, denom, det);
      break;
    }
  }
  inst.validate();
  return inst;
}

}  // namespace sensel
