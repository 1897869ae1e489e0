#include "sensel/relax.hpp"

#include <cmath>

#include "sensel/distances.hpp"

namespace sensel {

double psi_kl(double x, double y, double k0, double k1) {
  if (!(x > 0) || y < 0) throw std::invalid_argument("psi_kl: domain");
  double gap = std::sqrt(y) - std::sqrt(x / k1) - 1.0 / std::sqrt(k0);
  double plus = std::max(gap, 0.0);
  return x - std::log(x) + plus * plus;
}

double psi_c(double s, double x, double y, double k0, double k1) {
  if (!(x > 0) || y < 0 || s < 0 || s > 1)
    throw std::invalid_argument("psi_c: domain");
  double gap = std::sqrt(y) - std::sqrt(x / k1) - 1.0 / std::sqrt(k0);
  double plus = std::max(gap, 0.0);
  double blend = s + (1 - s) * x;
  return 0.5 * s * (1 - s) * plus * plus / blend -
         0.5 * (1 - s) * std::log(x) + 0.5 * std::log(blend);
}

namespace {

// Common representation of the sampled range of (S, mm'): for dimension 1
// and 2 a dense certified grid replaces the eigen-curve parametrization,
// which needs n >= 3.
struct RangeSampling {
  BoundarySample sample;
  MatrixXd A, B;
};

RangeSampling build_range_sampling(const WhitenedPair& w,
                                   const SolverParams& params) {
  const int n = static_cast<int>(w.S.rows());
  RangeSampling rs;
  rs.A = w.S;
  rs.B = w.M;
  if (n >= 3) {
    rs.sample = boundary_sample(w.S, w.M, params.K, params.J,
                                params.gap_threshold);
    return rs;
  }
  BoundarySample bs;
  bs.grid_size = 0;
  bs.interp_count = params.J;
  if (n == 1) {
    RangePoint p;
    p.t = 0;
    p.x = w.S(0, 0);
    p.y = w.M(0, 0);
    p.generator = VectorXd::Ones(1);
    bs.points.push_back(p);
  } else {
    const int grid = 10000;
    for (int i = 0; i < grid; ++i) {
      double th = i * M_PI / grid;
      VectorXd v(2);
      v << std::cos(th), std::sin(th);
      RangePoint p;
      p.t = th;
      p.x = v.dot(w.S * v);
      p.y = v.dot(w.M * v);
      p.generator = v;
      bs.points.push_back(p);
    }
  }
  rs.sample = bs;
  return rs;
}

VectorXd lift_direction(const WhitenedPair& w, const VectorXd& v) {
  VectorXd e = w.S0_inv_sqrt * v;
  e.normalize();
  detail::sign_normalize_largest(e);
  return e;
}

}  // namespace

VectorXd solve_1d_kl(const GaussianPair& pair, const UncertaintyModel& unc,
                     const SolverParams& params) {
  WhitenedPair w = whiten(pair);
  RangeSampling rs = build_range_sampling(w, params);
  const RangePoint& best = maximize_over_boundary(
      rs.sample,
      [&](double x, double y) {
        return psi_kl(x, std::max(y, 0.0), unc.k0, unc.k1);
      });
  VectorXd v = reconstruct_generator(rs.A, rs.B, best, rs.sample);
  return lift_direction(w, v);
}

Chernoff1DResult solve_1d_c(const GaussianPair& pair,
                            const UncertaintyModel& unc,
                            const SolverParams& params) {
  WhitenedPair w = whiten(pair);
  RangeSampling rs = build_range_sampling(w, params);

  auto inner = [&](double s) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : rs.sample.points)
      best = std::max(best, psi_c(s, p.x, std::max(p.y, 0.0), unc.k0, unc.k1));
    return best;
  };

  const int G = std::max(params.s_grid, 3);
  int best_i = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < G; ++i) {
    double s = static_cast<double>(i) / (G - 1);
    double v = inner(s);
    if (v > best_val) {
      best_val = v;
      best_i = i;
    }
  }
  double lo = std::max(0.0, (best_i - 1.0) / (G - 1));
  double hi = std::min(1.0, (best_i + 1.0) / (G - 1));
  auto [s_star, val] = detail::golden_max(inner, lo, hi, 1e-8);
  if (val < 1e-13) s_star = 0.5;

  const RangePoint& best = maximize_over_boundary(
      rs.sample,
      [&](double x, double y) {
        return psi_c(s_star, x, std::max(y, 0.0), unc.k0, unc.k1);
      });
  VectorXd v = reconstruct_generator(rs.A, rs.B, best, rs.sample);
  Chernoff1DResult out;
  out.direction = lift_direction(w, v);
  out.s_star = s_star;
  out.inner_value = std::max(val, 0.0);
  return out;
}

SubspaceBasis greedy_stiefel(const GaussianPair& pair,
                             const UncertaintyModel& unc, int p,
                             Criterion criterion,
                             const SolverParams& params) {
  const int n = pair.dim();
  if (p < 1 || p > n) throw std::invalid_argument("greedy_stiefel: p out of range");
  MatrixXd E(n, p);
  for (int j = 0; j < p; ++j) {
    MatrixXd U = j == 0 ? MatrixXd::Identity(n, n)
                        : detail::orthonormal_complement(E.leftCols(j));
    GaussianPair sub;
    sub.m0 = U.transpose() * pair.m0;
    sub.m1 = U.transpose() * pair.m1;
    sub.S0 = (U.transpose() * pair.S0 * U).eval();
    sub.S1 = (U.transpose() * pair.S1 * U).eval();
    sub.S0 = 0.5 * (sub.S0 + sub.S0.transpose()).eval();
    sub.S1 = 0.5 * (sub.S1 + sub.S1.transpose()).eval();
    VectorXd e_sub = criterion == Criterion::KL
                         ? solve_1d_kl(sub, unc, params)
                         : solve_1d_c(sub, unc, params).direction;
    VectorXd e = U * e_sub;
    e.normalize();
    detail::sign_normalize_largest(e);
    E.col(j) = e;
  }
  SubspaceBasis out{E};
  out.validate();
  return out;
}

}  // namespace sensel
