#include "sensel/rounding.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "sensel/distances.hpp"

namespace sensel {

namespace {

// min (x - z)' G (x - z) over (x - c)' A (x - c) <= 1.
VectorXd project_onto_ellipsoid(const VectorXd& z, const VectorXd& c,
                                const MatrixXd& A, const MatrixXd& G) {
  VectorXd d = z - c;
  if (d.dot(A * d) <= 1.0) return z;
  auto x_of = [&](double mu) -> VectorXd {
    return (G + mu * A).ldlt().solve(G * z + mu * A * c);
  };
  auto h = [&](double mu) {
    VectorXd x = x_of(mu);
    VectorXd e = x - c;
    return e.dot(A * e) - 1.0;
  };
  double lo = 0.0, hi = 1.0;
  while (h(hi) > 0) {
    lo = hi;
    hi *= 4.0;
    if (hi > 1e300) break;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    double mid = 0.5 * (lo + hi);
    if (h(mid) > 0)
      lo = mid;
    else
      hi = mid;
  }
  return x_of(0.5 * (lo + hi));
}

}  // namespace

QcqpResult qcqp_min_quadratic(const Ellipsoid& e0, const Ellipsoid& e1,
                              const MatrixXd& metric) {
  auto value = [&](const VectorXd& a, const VectorXd& b) {
    VectorXd d = b - a;
    return d.dot(metric * d);
  };
  QcqpResult r;
  if (e0.point && e1.point) {
    r.m0 = e0.center;
    r.m1 = e1.center;
    r.value = value(r.m0, r.m1);
    return r;
  }
  if (e0.point != e1.point) {
    const Ellipsoid& pt = e0.point ? e0 : e1;
    const Ellipsoid& el = e0.point ? e1 : e0;
    VectorXd proj = project_onto_ellipsoid(pt.center, el.center, el.shape, metric);
    r.m0 = e0.point ? pt.center : proj;
    r.m1 = e0.point ? proj : pt.center;
    r.value = value(r.m0, r.m1);
    if (r.value < 1e-14) r.value = 0;
    return r;
  }

  VectorXd m0 = e0.center, m1 = e1.center;
  double val = value(m0, m1);
  const int cap = 10000;
  int it = 0;
  for (; it < cap; ++it) {
    m0 = project_onto_ellipsoid(m1, e0.center, e0.shape, metric);
    m1 = project_onto_ellipsoid(m0, e1.center, e1.shape, metric);
    double next = value(m0, m1);
    if (next < 1e-14) {
      val = 0;
      break;
    }
    if (val - next <= 1e-13 * (1.0 + next)) {
      val = next;
      break;
    }
    val = next;
  }
  if (it == cap)
    throw std::runtime_error("qcqp_min_quadratic: no convergence (pathological conditioning)");
  r.m0 = m0;
  r.m1 = m1;
  r.value = std::max(val, 0.0);
  return r;
}

namespace {

// Whitened-projected coordinates: W = T E'S1E T with T = (E'S0E)^{-1/2},
// W = Q diag(lambda) Q'; uncertainty ellipsoids become k0 I and
// k1 diag(lambda)^{-1} around the transformed means.
struct Transformed {
  VectorXd lambda;  // eigenvalues of W, ascending
  VectorXd c0, c1;  // Q' T E' m_i
};

Transformed transform(const MatrixXd& E, const GaussianPair& pair) {
  MatrixXd A0 = E.transpose() * pair.S0 * E;
  MatrixXd A1 = E.transpose() * pair.S1 * E;
  A0 = 0.5 * (A0 + A0.transpose()).eval();
  A1 = 0.5 * (A1 + A1.transpose()).eval();
  MatrixXd T = detail::sym_power(A0, -0.5);
  MatrixXd W = T * A1 * T;
  W = 0.5 * (W + W.transpose()).eval();
  auto ew = detail::sym_eig(W);
  double floor = detail::kEigFloor * std::max(ew.values.maxCoeff(), 0.0);
  if (ew.values.minCoeff() <= floor)
    throw std::runtime_error("worst_case: projected S1 singular");
  Transformed tr;
  tr.lambda = ew.values;
  MatrixXd QtT = ew.vectors.transpose() * T * E.transpose();
  tr.c0 = QtT * pair.m0;
  tr.c1 = QtT * pair.m1;
  return tr;
}

Ellipsoid ellipsoid0(const Transformed& tr, double k0) {
  if (std::isinf(k0)) return Ellipsoid::at(tr.c0);
  int p = static_cast<int>(tr.c0.size());
  return Ellipsoid::of(tr.c0, k0 * MatrixXd::Identity(p, p));
}

Ellipsoid ellipsoid1(const Transformed& tr, double k1) {
  if (std::isinf(k1)) return Ellipsoid::at(tr.c1);
  return Ellipsoid::of(tr.c1,
                       (k1 * tr.lambda.cwiseInverse()).asDiagonal());
}

}  // namespace

double worst_case_kl(const MatrixXd& basis, const GaussianPair& pair,
                     const UncertaintyModel& unc) {
  if (unc.exact()) return kl_distance(pair, basis);
  const int p = static_cast<int>(basis.cols());
  Transformed tr = transform(basis, pair);
  MatrixXd I = MatrixXd::Identity(p, p);
  double d = qcqp_min_quadratic(ellipsoid0(tr, unc.k0),
                                ellipsoid1(tr, unc.k1), I)
                 .value;
  double spectral = (tr.lambda.array() - tr.lambda.array().log()).sum() - p;
  return 0.5 * (d + spectral);
}

double worst_case_kl(const SelectionMatrix& sel, const GaussianPair& pair,
                     const UncertaintyModel& unc) {
  return worst_case_kl(sel.to_basis(pair.dim()), pair, unc);
}

double worst_case_kl(const SubspaceBasis& basis, const GaussianPair& pair,
                     const UncertaintyModel& unc) {
  return worst_case_kl(basis.cols, pair, unc);
}

ChernoffResult worst_case_c(const MatrixXd& basis, const GaussianPair& pair,
                            const UncertaintyModel& unc) {
  if (unc.exact()) return chernoff_distance(pair, basis);
  Transformed tr = transform(basis, pair);
  Ellipsoid e0 = ellipsoid0(tr, unc.k0);
  Ellipsoid e1 = ellipsoid1(tr, unc.k1);
  auto f = [&](double s) {
    if (s <= 0 || s >= 1) return 0.0;
    VectorXd md = (s + (1 - s) * tr.lambda.array()).inverse();
    double d = qcqp_min_quadratic(e0, e1, MatrixXd(md.asDiagonal())).value;
    double log_term = 0;
    for (Eigen::Index i = 0; i < tr.lambda.size(); ++i)
      log_term += std::log(s + (1 - s) * tr.lambda[i]) -
                  (1 - s) * std::log(tr.lambda[i]);
    return 0.5 * (s * (1 - s) * d + log_term);
  };
  auto [s, v] = detail::golden_max(f, 0.0, 1.0, 1e-8);
  if (v < 1e-13) return {0.0, 0.5};
  return {v, s};
}

ChernoffResult worst_case_c(const SelectionMatrix& sel,
                            const GaussianPair& pair,
                            const UncertaintyModel& unc) {
  return worst_case_c(sel.to_basis(pair.dim()), pair, unc);
}

ChernoffResult worst_case_c(const SubspaceBasis& basis,
                            const GaussianPair& pair,
                            const UncertaintyModel& unc) {
  return worst_case_c(basis.cols, pair, unc);
}

double worst_case(Criterion criterion, const MatrixXd& basis,
                  const GaussianPair& pair, const UncertaintyModel& unc) {
  return criterion == Criterion::KL ? worst_case_kl(basis, pair, unc)
                                    : worst_case_c(basis, pair, unc).value;
}

SelectionMatrix project_to_selection(const SubspaceBasis& E, int p) {
  const int n = E.n();
  VectorXd diag = E.cols.rowwise().squaredNorm();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return diag[a] > diag[b]; });
  std::vector<int> idx(order.begin(), order.begin() + p);
  for (int& i : idx) ++i;
  return SelectionMatrix::of(std::move(idx));
}

SelectionMatrix refine(const SelectionMatrix& start, const GaussianPair& pair,
                       const UncertaintyModel& unc, Criterion criterion) {
  const int n = pair.dim();
  const int p = start.p();
  std::vector<int> current = start.indices;
  auto eval = [&](const std::vector<int>& idx) {
    return worst_case(criterion,
                      SelectionMatrix::of(idx).to_basis(n), pair, unc);
  };
  for (int pass = 0; pass < p; ++pass) {
    bool changed = false;
    for (int col = 0; col < p; ++col) {
      std::vector<bool> used(n + 1, false);
      for (int j = 0; j < p; ++j)
        if (j != col) used[current[j]] = true;
      int best_sensor = current[col];
      double best_val = -std::numeric_limits<double>::infinity();
      for (int cand = 1; cand <= n; ++cand) {
        if (used[cand]) continue;
        std::vector<int> trial = current;
        trial[col] = cand;
        double v = eval(trial);
        if (v > best_val) {
          best_val = v;
          best_sensor = cand;
        }
      }
      if (best_sensor != current[col]) changed = true;
      current[col] = best_sensor;
    }
    if (!changed) break;  // a further pass would be a no-op
  }
  return SelectionMatrix::of(current);
}

namespace {

PipelineResult run_pipeline(const ProblemInstance& instance,
                            Criterion criterion, const SolverParams& params) {
  instance.validate();
  using clock = std::chrono::steady_clock;
  auto ms = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };
  PipelineResult res;

  auto t0 = clock::now();
  SubspaceBasis E = greedy_stiefel(instance.pair, instance.uncertainty,
                                   instance.p, criterion, params);
  res.stiefel_objective =
      worst_case(criterion, E.cols, instance.pair, instance.uncertainty);
  auto t1 = clock::now();
  res.phase_trace.push_back({"relaxation", res.stiefel_objective, ms(t0, t1)});

  SelectionMatrix sel = project_to_selection(E, instance.p);
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

PipelineResult r_kl(const ProblemInstance& instance,
                    const SolverParams& params) {
  return run_pipeline(instance, Criterion::KL, params);
}

PipelineResult r_c(const ProblemInstance& instance,
                   const SolverParams& params) {
  return run_pipeline(instance, Criterion::Chernoff, params);
}

}  // namespace sensel
