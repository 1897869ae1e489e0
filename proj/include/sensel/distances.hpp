#pragma once

#include "sensel/types.hpp"

namespace sensel {

// Projected pair (E'm0, E'm1, E'S0E, E'S1E). E may be any dimension-
// compatible basis; selection matrices are a special case.
GaussianPair project_pair(const GaussianPair& pair, const MatrixXd& basis);
GaussianPair project_pair(const GaussianPair& pair, const SelectionMatrix& sel);
GaussianPair project_pair(const GaussianPair& pair, const SubspaceBasis& basis);

// Kullback-Leibler distance between the projected distributions,
// D_KL(N(E'm1, E'S1E) || N(E'm0, E'S0E)).
double kl_distance(const GaussianPair& pair, const MatrixXd& basis);
double kl_distance(const GaussianPair& pair, const SelectionMatrix& sel);
double kl_distance(const GaussianPair& pair, const SubspaceBasis& basis);

// Chernoff s-divergence exponent of the projected pair; zero at s = 0, 1
// and concave in s.
double chernoff_objective(double s, const GaussianPair& pair,
                          const MatrixXd& basis);

struct ChernoffResult {
  double value = 0;
  double s_star = 0.5;
};

// max over s in [0,1] of chernoff_objective, by golden-section search.
ChernoffResult chernoff_distance(const GaussianPair& pair,
                                 const MatrixXd& basis);
ChernoffResult chernoff_distance(const GaussianPair& pair,
                                 const SelectionMatrix& sel);
ChernoffResult chernoff_distance(const GaussianPair& pair,
                                 const SubspaceBasis& basis);

WhitenedPair whiten(const GaussianPair& pair);

}  // namespace sensel
