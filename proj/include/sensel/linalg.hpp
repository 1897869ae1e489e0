#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace sensel::detail {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Relative eigenvalue floor used for all symmetric inverses / square roots.
inline constexpr double kEigFloor = 1e-12;

struct SymEig {
  VectorXd values;   // ascending
  MatrixXd vectors;  // columns
};

inline void check_symmetric(const MatrixXd& A, double rtol = 1e-9,
                            const char* what = "matrix") {
  double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > rtol * scale)
    throw std::invalid_argument(std::string(what) + " is not symmetric");
}

inline SymEig sym_eig(const MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(A);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

// A^expo for symmetric positive definite A. Throws if A is numerically
// singular (min eigenvalue below kEigFloor * max eigenvalue) and expo < 0.
inline MatrixXd sym_power(const MatrixXd& A, double expo) {
  SymEig e = sym_eig(A);
  double lmax = e.values.maxCoeff();
  double floor = kEigFloor * std::max(lmax, 0.0);
  if (expo < 0 || 2 * expo != std::round(2 * expo)) {
    if (e.values.minCoeff() <= floor)
      throw std::runtime_error("matrix numerically singular in sym_power");
  }
  VectorXd d(e.values.size());
  for (Eigen::Index i = 0; i < d.size(); ++i)
    d[i] = std::pow(std::max(e.values[i], floor), expo);
  return e.vectors * d.asDiagonal() * e.vectors.transpose();
}

inline double logdet_spd(const MatrixXd& A) {
  SymEig e = sym_eig(A);
  double lmax = e.values.maxCoeff();
  if (e.values.minCoeff() <= kEigFloor * std::max(lmax, 0.0))
    throw std::runtime_error("singular matrix in logdet");
  return e.values.array().log().sum();
}

// Orthonormal basis of the orthogonal complement of span(cols) in R^n,
// via full Householder QR.
inline MatrixXd orthonormal_complement(const MatrixXd& cols) {
  const Eigen::Index n = cols.rows(), j = cols.cols();
  Eigen::HouseholderQR<MatrixXd> qr(cols);
  MatrixXd Q = qr.householderQ();
  return Q.rightCols(n - j);
}

// Flip sign so the first significantly nonzero entry is positive.
inline void sign_normalize_first(VectorXd& v) {
  double scale = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12 * scale) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

// Flip sign so the largest-magnitude entry is positive.
inline void sign_normalize_largest(VectorXd& v) {
  Eigen::Index imax;
  v.cwiseAbs().maxCoeff(&imax);
  if (v[imax] < 0) v = -v;
}

// Golden-section maximization of a unimodal f on [a, b].
template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b,
                                     double tol = 1e-10) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
  }
  double xm = 0.5 * (a + b);
  return {xm, f(xm)};
}

}  // namespace sensel::detail
