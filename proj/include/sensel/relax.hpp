#pragma once

#include "sensel/numrange.hpp"
#include "sensel/types.hpp"

namespace sensel {

struct SolverParams {
  int K = 1000;             // boundary grid size
  int J = 10;               // chord interpolation count
  double gap_threshold = 0; // <= 0: scale-free default
  int s_grid = 33;          // Chernoff outer grid
};

// Objective of the whitened p=1 robust KL problem on a range point (x, y):
// x - log x + {(sqrt(y) - sqrt(x)/sqrt(k1) - 1/sqrt(k0))^+}^2.
double psi_kl(double x, double y, double k0, double k1);

// Chernoff counterpart for fixed s in [0,1].
double psi_c(double s, double x, double y, double k0, double k1);

// Globally solves the p=1 robust Stiefel relaxation (KL criterion):
// whiten, sample the range boundary of (S, mm'), maximize psi_kl,
// reconstruct the generator and map it back through S0^{-1/2}.
VectorXd solve_1d_kl(const GaussianPair& pair, const UncertaintyModel& unc,
                     const SolverParams& params = {});

struct Chernoff1DResult {
  VectorXd direction;
  double s_star = 0.5;
  double inner_value = 0;  // psi_c at the optimum
};

// Chernoff analogue: grid over s with golden-section polish around the best
// grid point; the boundary sample is shared across all s.
Chernoff1DResult solve_1d_c(const GaussianPair& pair,
                            const UncertaintyModel& unc,
                            const SolverParams& params = {});

// Greedy deflation for p > 1: each column solves the p=1 problem on the
// orthogonal complement of the previous columns.
SubspaceBasis greedy_stiefel(const GaussianPair& pair,
                             const UncertaintyModel& unc, int p,
                             Criterion criterion,
                             const SolverParams& params = {});

}  // namespace sensel
