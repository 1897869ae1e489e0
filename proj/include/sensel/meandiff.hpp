#pragma once

#include <optional>

#include "sensel/rounding.hpp"
#include "sensel/types.hpp"

namespace sensel {

// Per-eigenvalue gain of the equal-means KL relaxation: x - log x - 1.
double phi_kl(double x);

// Chernoff counterpart: log(s + (1-s)x) - (1-s) log x.
double phi_c(double s, double x);

// Solution of the equal-means Stiefel relaxation: the optimum always takes
// the j smallest and p-j largest eigenvalues of S for some switching index
// j in [0, p], so only p+1 candidates are swept.
struct EigenSelection {
  int switching_index = 0;
  VectorXd chosen_eigs;
  MatrixXd chosen_vecs;  // n x p orthonormal columns
  double objective = 0;  // sum of per-eigenvalue gains
  std::optional<double> s_star;  // Chernoff only
};

EigenSelection eqmeans_kl(const MatrixXd& S, int p);
EigenSelection eqmeans_c(const MatrixXd& S, int p);

struct MdRelaxation {
  SubspaceBasis basis;
  MatrixXd raw;  // pre-orthonormalization columns, for inspection
};

// Mean-difference relaxation: first column along m1 - m0, remaining columns
// from the equal-means solution on the orthogonal complement, then
// re-orthonormalized (first column preserved).
MdRelaxation md_relaxation(const GaussianPair& pair, int p,
                           Criterion criterion);

// Full fast pipelines; require the no-uncertainty model (k0 = k1 = inf).
PipelineResult md_kl(const ProblemInstance& instance);
PipelineResult md_c(const ProblemInstance& instance);

}  // namespace sensel
