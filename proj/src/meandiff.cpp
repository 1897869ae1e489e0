#include "sensel/meandiff.hpp"

#include <chrono>
#include <cmath>

#include "sensel/distances.hpp"

namespace sensel {

double phi_kl(double x) {
  if (!(x > 0)) throw std::invalid_argument("phi_kl: x must be positive");
  return x - std::log(x) - 1.0;
}

double phi_c(double s, double x) {
  if (!(x > 0) || s < 0 || s > 1) throw std::invalid_argument("phi_c: domain");
  return std::log(s + (1 - s) * x) - (1 - s) * std::log(x);
}

namespace {

std::vector<int> candidate_indices(int n, int p, int j) {
  std::vector<int> idx;
  idx.reserve(p);
  for (int i = 0; i < j; ++i) idx.push_back(i);
  for (int i = n - p + j; i < n; ++i) idx.push_back(i);
  return idx;
}

// argmax over s in [0,1] of sum phi_c(s, x_i): safeguarded Newton on the
// (decreasing) derivative, bisection fallback.
std::pair<double, double> best_s(const VectorXd& x) {
  auto g = [&](double s) {
    double v = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) v += phi_c(s, x[i]);
    return v;
  };
  auto g1 = [&](double s) {
    double v = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      v += (1 - x[i]) / (s + (1 - s) * x[i]) + std::log(x[i]);
    return v;
  };
  auto g2 = [&](double s) {
    double v = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      double b = s + (1 - s) * x[i];
      v -= (1 - x[i]) * (1 - x[i]) / (b * b);
    }
    return v;
  };
  double lo = 1e-9, hi = 1 - 1e-9;
  double dlo = g1(lo), dhi = g1(hi);
  if (std::abs(dlo) < 1e-14 && std::abs(dhi) < 1e-14) return {0.5, g(0.5)};
  if (dlo <= 0) return {lo, g(lo)};
  if (dhi >= 0) return {hi, g(hi)};
  double s = 0.5;
  for (int it = 0; it < 100; ++it) {
    double d1 = g1(s);
    if (std::abs(d1) < 1e-14) break;
    if (d1 > 0)
      lo = s;
    else
      hi = s;
    double d2 = g2(s);
    double step = d2 < -1e-300 ? s - d1 / d2 : std::nan("");
    s = (std::isfinite(step) && step > lo && step < hi) ? step
                                                        : 0.5 * (lo + hi);
    if (hi - lo < 1e-14) break;
  }
  return {s, g(s)};
}

EigenSelection eqmeans_impl(const MatrixXd& S, int p, Criterion criterion) {
  detail::check_symmetric(S, 1e-9, "S");
  const int n = static_cast<int>(S.rows());
  if (p < 1 || p > n) throw std::invalid_argument("eqmeans: p out of range");
  auto es = detail::sym_eig(S);
  if (es.values.minCoeff() <=
      detail::kEigFloor * std::max(es.values.maxCoeff(), 0.0))
    throw std::invalid_argument("eqmeans: S not positive definite");

  int best_j = 0;
  double best_phi = -std::numeric_limits<double>::infinity();
  double best_s_val = 0.5;
  for (int j = 0; j <= p; ++j) {
    auto idx = candidate_indices(n, p, j);
    VectorXd x(p);
    for (int i = 0; i < p; ++i) x[i] = es.values[idx[i]];
    double phi;
    double s = 0.5;
    if (criterion == Criterion::KL) {
      phi = 0;
      for (int i = 0; i < p; ++i) phi += phi_kl(x[i]);
    } else {
      std::tie(s, phi) = best_s(x);
    }
    if (phi > best_phi) {
      best_phi = phi;
      best_j = j;
      best_s_val = s;
    }
  }

  EigenSelection out;
  out.switching_index = best_j;
  auto idx = candidate_indices(n, p, best_j);
  out.chosen_eigs.resize(p);
  out.chosen_vecs.resize(n, p);
  for (int i = 0; i < p; ++i) {
    out.chosen_eigs[i] = es.values[idx[i]];
    out.chosen_vecs.col(i) = es.vectors.col(idx[i]);
  }
  out.objective = std::max(best_phi, 0.0);
  if (criterion == Criterion::Chernoff) out.s_star = best_s_val;
  return out;
}

}  // namespace

EigenSelection eqmeans_kl(const MatrixXd& S, int p) {
  return eqmeans_impl(S, p, Criterion::KL);
}

EigenSelection eqmeans_c(const MatrixXd& S, int p) {
  return eqmeans_impl(S, p, Criterion::Chernoff);
}

MdRelaxation md_relaxation(const GaussianPair& pair, int p,
                           Criterion criterion) {
  const int n = pair.dim();
  if (p < 1 || p > n) throw std::invalid_argument("md_relaxation: p range");
  VectorXd dm = pair.m1 - pair.m0;
  MdRelaxation out;

  if (dm.norm() <= 1e-12) {
    // equal means: whole problem is the analytic eigenvalue selection
    WhitenedPair w = whiten(pair);
    EigenSelection es = eqmeans_impl(w.S, p, criterion);
    out.raw = w.S0_inv_sqrt * es.chosen_vecs;
  } else {
    VectorXd e1 = dm.normalized();
    out.raw.resize(n, p);
    out.raw.col(0) = e1;
    if (p > 1) {
      MatrixXd U = detail::orthonormal_complement(e1);
      MatrixXd A0 = U.transpose() * pair.S0 * U;
      A0 = 0.5 * (A0 + A0.transpose()).eval();
      MatrixXd B = detail::sym_power(A0, -0.5);
      MatrixXd A1 = U.transpose() * pair.S1 * U;
      MatrixXd Sp = B * A1 * B;
      Sp = 0.5 * (Sp + Sp.transpose()).eval();
      EigenSelection es = eqmeans_impl(Sp, p - 1, criterion);
      out.raw.rightCols(p - 1) = U * (B * es.chosen_vecs);
    }
  }

  // modified Gram-Schmidt, keeping the leading column direction
  MatrixXd E = out.raw;
  for (int j = 0; j < p; ++j) {
    VectorXd v = E.col(j);
    for (int i = 0; i < j; ++i) v -= E.col(i).dot(v) * E.col(i);
    double nv = v.norm();
    if (nv < 1e-10)
      throw std::runtime_error("md_relaxation: rank-deficient basis");
    E.col(j) = v / nv;
  }
  out.basis = SubspaceBasis{E};
  out.basis.validate();
  return out;
}

namespace {

PipelineResult md_pipeline(const ProblemInstance& instance,
                           Criterion criterion) {
  instance.validate();
  if (!instance.uncertainty.exact())
    throw std::invalid_argument(
        "mean-difference solvers need k0 = k1 = inf; use r_kl / r_c for "
        "finite uncertainty");
  using clock = std::chrono::steady_clock;
  auto ms = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };
  PipelineResult res;

  auto t0 = clock::now();
  MdRelaxation relax = md_relaxation(instance.pair, instance.p, criterion);
  res.stiefel_objective = worst_case(criterion, relax.basis.cols,
                                     instance.pair, instance.uncertainty);
  auto t1 = clock::now();
  res.phase_trace.push_back({"relaxation", res.stiefel_objective, ms(t0, t1)});

  SelectionMatrix sel = project_to_selection(relax.basis, instance.p);
  double proj_obj = worst_case(criterion, sel.to_basis(instance.pair.dim()),
                               instance.pair, instance.uncertainty);
  auto t2 = clock::now();
  res.phase_trace.push_back({"projection", proj_obj, ms(t1, t2)});

  res.selection = refine(sel, instance.pair, instance.uncertainty, criterion);
  res.objective =
      worst_case(criterion, res.selection.to_basis(instance.pair.dim()),
                 instance.pair, instance.uncertainty);
  auto t3 = clock::now();
  res.phase_trace.push_back({"refinement", res.objective, ms(t2, t3)});
  return res;
}

}  // namespace

PipelineResult md_kl(const ProblemInstance& instance) {
  return md_pipeline(instance, Criterion::KL);
}

PipelineResult md_c(const ProblemInstance& instance) {
  return md_pipeline(instance, Criterion::Chernoff);
}

}  // namespace sensel
