#include "sensel/distances.hpp"

#include <cmath>

namespace sensel {

using detail::sym_eig;

GaussianPair project_pair(const GaussianPair& pair, const MatrixXd& basis) {
  if (basis.rows() != pair.dim())
    throw std::invalid_argument("project_pair: basis dimension mismatch");
  GaussianPair out;
  out.m0 = basis.transpose() * pair.m0;
  out.m1 = basis.transpose() * pair.m1;
  out.S0 = basis.transpose() * pair.S0 * basis;
  out.S1 = basis.transpose() * pair.S1 * basis;
  out.S0 = 0.5 * (out.S0 + out.S0.transpose()).eval();
  out.S1 = 0.5 * (out.S1 + out.S1.transpose()).eval();
  auto check_pd = [](const MatrixXd& S, const char* name) {
    auto e = sym_eig(S);
    if (e.values.minCoeff() <=
        detail::kEigFloor * std::max(e.values.maxCoeff(), 0.0))
      throw std::runtime_error(std::string("project_pair: projected ") + name +
                               " lost positive definiteness");
  };
  check_pd(out.S0, "S0");
  check_pd(out.S1, "S1");
  return out;
}

GaussianPair project_pair(const GaussianPair& pair, const SelectionMatrix& sel) {
  return project_pair(pair, sel.to_basis(pair.dim()));
}

GaussianPair project_pair(const GaussianPair& pair, const SubspaceBasis& basis) {
  return project_pair(pair, basis.cols);
}

namespace {

struct ProjectedForms {
  VectorXd dm;    // E'(m1 - m0)
  MatrixXd A0, A1;
};

ProjectedForms project_forms(const GaussianPair& pair, const MatrixXd& E) {
  if (E.rows() != pair.dim())
    throw std::invalid_argument("basis dimension mismatch");
  ProjectedForms f;
  f.dm = E.transpose() * (pair.m1 - pair.m0);
  f.A0 = E.transpose() * pair.S0 * E;
  f.A1 = E.transpose() * pair.S1 * E;
  f.A0 = 0.5 * (f.A0 + f.A0.transpose()).eval();
  f.A1 = 0.5 * (f.A1 + f.A1.transpose()).eval();
  return f;
}

}  // namespace

double kl_distance(const GaussianPair& pair, const MatrixXd& basis) {
  ProjectedForms f = project_forms(pair, basis);
  const int p = static_cast<int>(basis.cols());
  auto e0 = sym_eig(f.A0);
  if (e0.values.minCoeff() <=
      detail::kEigFloor * std::max(e0.values.maxCoeff(), 0.0))
    throw std::runtime_error("kl_distance: projected S0 singular");
  MatrixXd A0inv = e0.vectors *
                   e0.values.cwiseInverse().asDiagonal() *
                   e0.vectors.transpose();
  double mean_term = f.dm.dot(A0inv * f.dm);
  double trace_term = (A0inv * f.A1).trace();
  double logdet = detail::logdet_spd(f.A1) - e0.values.array().log().sum();
  return 0.5 * (mean_term + trace_term - logdet - p);
}

double kl_distance(const GaussianPair& pair, const SelectionMatrix& sel) {
  return kl_distance(pair, sel.to_basis(pair.dim()));
}

double kl_distance(const GaussianPair& pair, const SubspaceBasis& basis) {
  return kl_distance(pair, basis.cols);
}

double chernoff_objective(double s, const GaussianPair& pair,
                          const MatrixXd& basis) {
  if (s < 0 || s > 1)
    throw std::invalid_argument("chernoff_objective: s outside [0,1]");
  if (s == 0 || s == 1) return 0.0;
  ProjectedForms f = project_forms(pair, basis);
  MatrixXd blend = s * f.A0 + (1 - s) * f.A1;
  auto eb = sym_eig(blend);
  if (eb.values.minCoeff() <=
      detail::kEigFloor * std::max(eb.values.maxCoeff(), 0.0))
    throw std::runtime_error("chernoff_objective: blended covariance singular");
  MatrixXd blend_inv = eb.vectors *
                       eb.values.cwiseInverse().asDiagonal() *
                       eb.vectors.transpose();
  double mean_term = s * (1 - s) * f.dm.dot(blend_inv * f.dm);
  double logdet_blend = eb.values.array().log().sum();
  double log_term = s * detail::logdet_spd(f.A0) +
                    (1 - s) * detail::logdet_spd(f.A1) - logdet_blend;
  return 0.5 * (mean_term - log_term);
}

ChernoffResult chernoff_distance(const GaussianPair& pair,
                                 const MatrixXd& basis) {
  auto [s, v] = detail::golden_max(
      [&](double s) { return chernoff_objective(s, pair, basis); }, 0.0, 1.0,
      1e-10);
  if (v < 1e-13) return {0.0, 0.5};
  return {v, s};
}

ChernoffResult chernoff_distance(const GaussianPair& pair,
                                 const SelectionMatrix& sel) {
  return chernoff_distance(pair, sel.to_basis(pair.dim()));
}

ChernoffResult chernoff_distance(const GaussianPair& pair,
                                 const SubspaceBasis& basis) {
  return chernoff_distance(pair, basis.cols);
}

WhitenedPair whiten(const GaussianPair& pair) {
  auto e0 = sym_eig(pair.S0);
  double lmax = e0.values.maxCoeff();
  if (e0.values.minCoeff() <= detail::kEigFloor * std::max(lmax, 0.0))
    throw std::runtime_error("whiten: S0 numerically singular");
  WhitenedPair w;
  w.S0_inv_sqrt = e0.vectors *
                  e0.values.array().rsqrt().matrix().asDiagonal() *
                  e0.vectors.transpose();
  w.S = w.S0_inv_sqrt * pair.S1 * w.S0_inv_sqrt;
  w.S = 0.5 * (w.S + w.S.transpose()).eval();
  w.m = w.S0_inv_sqrt * (pair.m1 - pair.m0);
  w.M = w.m * w.m.transpose();
  return w;
}

}  // namespace sensel
