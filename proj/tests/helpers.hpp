#pragma once

#include <Eigen/Dense>

#include "sensel/rng.hpp"
#include "sensel/types.hpp"

namespace sensel::test {

inline MatrixXd random_matrix(Rng& rng, int r, int c) {
  MatrixXd M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = rng.normal();
  return M;
}

inline VectorXd random_vector(Rng& rng, int n) {
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

inline VectorXd random_unit(Rng& rng, int n) {
  return random_vector(rng, n).normalized();
}

inline MatrixXd random_spd(Rng& rng, int n, double ridge = 0.5) {
  MatrixXd A = random_matrix(rng, n, n);
  MatrixXd S = A * A.transpose() + ridge * MatrixXd::Identity(n, n);
  return 0.5 * (S + S.transpose());
}

inline GaussianPair random_pair(Rng& rng, int n, bool equal_means = false) {
  GaussianPair pair;
  pair.m0 = random_vector(rng, n);
  pair.m1 = equal_means ? pair.m0 : random_vector(rng, n);
  pair.S0 = random_spd(rng, n);
  pair.S1 = random_spd(rng, n);
  return pair;
}

// Random orthogonal p x p matrix via QR with positive diagonal R.
inline MatrixXd random_orthogonal(Rng& rng, int p) {
  Eigen::HouseholderQR<MatrixXd> qr(random_matrix(rng, p, p));
  MatrixXd Q = qr.householderQ();
  MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < p; ++i)
    if (R(i, i) < 0) Q.col(i) = -Q.col(i);
  return Q;
}

// Random n x p Stiefel point.
inline MatrixXd random_stiefel(Rng& rng, int n, int p) {
  Eigen::HouseholderQR<MatrixXd> qr(random_matrix(rng, n, p));
  MatrixXd Q = qr.householderQ();
  return Q.leftCols(p);
}

}  // namespace sensel::test
