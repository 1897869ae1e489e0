#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <utility>
#include <vector>

#include "sensel/rounding.hpp"
#include "sensel/types.hpp"

namespace sensel {

// Enumerates all C(n,p) selections and returns the worst-case optimum;
// ties go to the lexicographically smallest index set. Throws if C(n,p)
// exceeds `cap`.
std::pair<SelectionMatrix, double> exhaustive_opt(
    const ProblemInstance& instance, Criterion criterion,
    std::uint64_t cap = 2000000);

struct DetectionStats {
  double pe = 0;  // Bayes error at zero threshold, equal priors
  std::vector<double> thresholds;
  std::vector<double> pfa;
  std::vector<double> pd;  // monotone-cleaned
  int trials = 0;
  std::uint64_t seed = 0;
};

// Monte Carlo Bayes error of the zero-threshold LLR detector on the
// projected pair: trials/2 samples per hypothesis, seeded block streams so
// results are bit-identical for a given seed.
double estimate_pe(const SelectionMatrix& sel, const GaussianPair& pair,
                   int trials, std::uint64_t seed);

// Mismatched variant: the detector uses `detector_pair`'s (projected)
// parameters while samples are drawn from `true_pair`.
double estimate_pe_mismatched(const SelectionMatrix& sel,
                              const GaussianPair& detector_pair,
                              const GaussianPair& true_pair, int trials,
                              std::uint64_t seed);

// Empirical ROC over `grid` LLR-quantile thresholds, with running-max
// cleanup of P_D in increasing P_FA; pe comes from the same LLR draws.
DetectionStats estimate_roc(const SelectionMatrix& sel,
                            const GaussianPair& pair, int trials,
                            std::uint64_t seed, int grid = 512);

// Piecewise-linear interpolation of P_D in P_FA; sets *clamped when pfa
// falls outside the sampled range.
double interpolate_pd(const DetectionStats& stats, double pfa,
                      bool* clamped = nullptr);

void dump_roc_csv(const DetectionStats& stats, std::ostream& os);

struct SimpleGraph {
  int n_vertices = 0;
  std::vector<std::pair<int, int>> edges;  // 1-based, i < j

  static SimpleGraph complete(int n);
  static SimpleGraph path(int n);
  static SimpleGraph cycle(int n);
  static SimpleGraph edgeless(int n);
  void validate() const;
};

// S(G): 2n on the diagonal, -1 on edges, 0 otherwise. Strictly diagonally
// dominant, hence positive definite.
MatrixXd clique_matrix(const SimpleGraph& g);

// Sum of the entries of A^{-1}.
double sei(const MatrixXd& A);

// The decision-problem reduction instance: m0 = 0, m1 = 1, S0 = S1 = S(G),
// no uncertainty.
ProblemInstance hardness_instance(const SimpleGraph& g, int p);

// Brute-force p-clique test (reference only; exponential).
bool has_clique(const SimpleGraph& g, int p);

// KL values of selections {1}, {1,2}, {1,3}, {1,2,3} for the 3-dim
// counterexample S1 = I + eps (h2 h3' + h3 h2'); the first three are 0,
// the last -log(1 - eps^2)/2, violating submodularity.
std::array<double, 4> submodularity_counterexample(double epsilon);

}  // namespace sensel
