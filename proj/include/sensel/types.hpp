#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sensel/linalg.hpp"

namespace sensel {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Criterion { KL, Chernoff };

// The two hypothesis distributions N(m0, S0) and N(m1, S1) in n dimensions.
struct GaussianPair {
  VectorXd m0, m1;
  MatrixXd S0, S1;

  int dim() const { return static_cast<int>(m0.size()); }

  void validate() const {
    const auto n = m0.size();
    if (m1.size() != n || S0.rows() != n || S0.cols() != n ||
        S1.rows() != n || S1.cols() != n)
      throw std::invalid_argument("GaussianPair: dimension mismatch");
    detail::check_symmetric(S0, 1e-12, "S0");
    detail::check_symmetric(S1, 1e-12, "S1");
    if (detail::sym_eig(S0).values.minCoeff() <= 0 ||
        detail::sym_eig(S1).values.minCoeff() <= 0)
      throw std::invalid_argument("GaussianPair: covariance not positive definite");
  }
};

// Ellipsoidal mean uncertainty: the true mean m_i satisfies
// (m_i - m0/m1)' S_i^{-1} (m_i - m0/m1) <= 1/k_i. Larger k_i means a
// smaller region; k_i = +inf collapses the region to the stored mean, i.e.
// no uncertainty at all.
struct UncertaintyModel {
  double k0 = kInf;
  double k1 = kInf;

  bool exact() const { return std::isinf(k0) && std::isinf(k1); }

  void validate() const {
    if (!(k0 > 0) || !(k1 > 0))
      throw std::invalid_argument("UncertaintyModel: k0, k1 must be positive");
  }
};

// A p-subset of sensors, stored as sorted 1-based indices. Equivalent to
// the n x p matrix with one unit entry per column.
struct SelectionMatrix {
  std::vector<int> indices;

  static SelectionMatrix of(std::vector<int> idx) {
    std::sort(idx.begin(), idx.end());
    for (size_t i = 0; i + 1 < idx.size(); ++i)
      if (idx[i] == idx[i + 1])
        throw std::invalid_argument("SelectionMatrix: duplicate index");
    if (!idx.empty() && idx.front() < 1)
      throw std::invalid_argument("SelectionMatrix: indices are 1-based");
    return SelectionMatrix{std::move(idx)};
  }

  int p() const { return static_cast<int>(indices.size()); }

  MatrixXd to_basis(int n) const {
    MatrixXd E = MatrixXd::Zero(n, p());
    for (int j = 0; j < p(); ++j) {
      if (indices[j] > n)
        throw std::invalid_argument("SelectionMatrix: index out of range");
      E(indices[j] - 1, j) = 1.0;
    }
    return E;
  }

  bool operator==(const SelectionMatrix& o) const { return indices == o.indices; }
};

// An n x p matrix with orthonormal columns (a Stiefel point).
struct SubspaceBasis {
  MatrixXd cols;

  int n() const { return static_cast<int>(cols.rows()); }
  int p() const { return static_cast<int>(cols.cols()); }

  void validate() const {
    MatrixXd G = cols.transpose() * cols;
    G.diagonal().array() -= 1.0;
    if (G.cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("SubspaceBasis: columns not orthonormal");
  }
};

// S0^{-1/2} S1 S0^{-1/2}, S0^{-1/2}(m1 - m0) and the rank-one M = m m'.
struct WhitenedPair {
  MatrixXd S;
  VectorXd m;
  MatrixXd M;
  MatrixXd S0_inv_sqrt;  // kept for mapping whitened directions back
};

struct ProblemInstance {
  GaussianPair pair;
  UncertaintyModel uncertainty;
  int p = 1;

  void validate() const {
    pair.validate();
    uncertainty.validate();
    if (p < 1 || p > pair.dim())
      throw std::invalid_argument("ProblemInstance: p out of range");
  }
};

}  // namespace sensel
