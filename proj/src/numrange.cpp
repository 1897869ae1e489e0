#include "sensel/numrange.hpp"

#include <cmath>

namespace sensel {

namespace {

// Minimal eigenpair with a deterministic sign/column choice when the
// smallest eigenvalue is (numerically) repeated.
std::pair<double, VectorXd> min_eigpair(const MatrixXd& C) {
  auto e = detail::sym_eig(C);
  double lmin = e.values[0];
  double scale = std::max(1.0, e.values.cwiseAbs().maxCoeff());
  int best = 0;
  double best_lead = -1;
  for (int i = 0; i < e.values.size() && e.values[i] <= lmin + 1e-12 * scale;
       ++i) {
    VectorXd v = e.vectors.col(i);
    double vmax = v.cwiseAbs().maxCoeff();
    double lead = 0;
    for (Eigen::Index j = 0; j < v.size(); ++j)
      if (std::abs(v[j]) > 1e-12 * vmax) {
        lead = std::abs(v[j]);
        break;
      }
    if (lead > best_lead) {
      best_lead = lead;
      best = i;
    }
  }
  VectorXd v = e.vectors.col(best);
  detail::sign_normalize_first(v);
  return {lmin, v};
}

RangePoint vertex_point(const MatrixXd& A, const MatrixXd& B, double t,
                        const VectorXd& v) {
  RangePoint p;
  p.t = t;
  p.x = v.dot(A * v);
  p.y = v.dot(B * v);
  p.generator = v;
  p.source = PointSource::vertex;
  return p;
}

}  // namespace

BoundarySample boundary_sample(const MatrixXd& A, const MatrixXd& B, int K,
                               int J, double gap_threshold) {
  detail::check_symmetric(A, 1e-9, "A");
  detail::check_symmetric(B, 1e-9, "B");
  if (K < 1 || J < 1) throw std::invalid_argument("boundary_sample: K, J >= 1");
  const int n = static_cast<int>(A.rows());

  std::vector<RangePoint> verts;
  verts.reserve(K);
  for (int k = 0; k < K; ++k) {
    double t = k * 2.0 * M_PI / K;
    MatrixXd C = A * std::cos(t) + B * std::sin(t);
    auto [lmin, v] = min_eigpair(C);
    (void)lmin;
    verts.push_back(vertex_point(A, B, t, v));
  }

  if (gap_threshold <= 0) {
    double xmin = verts[0].x, xmax = verts[0].x;
    double ymin = verts[0].y, ymax = verts[0].y;
    for (const auto& p : verts) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    gap_threshold = 0.01 * std::hypot(xmax - xmin, ymax - ymin);
    if (gap_threshold <= 0) gap_threshold = 1e-12;
  }

  BoundarySample out;
  out.grid_size = K;
  out.interp_count = J;
  out.gap_threshold = gap_threshold;
  out.vertex_position.resize(K);
  for (int k = 0; k < K; ++k) {
    out.vertex_position[k] = static_cast<int>(out.points.size());
    out.points.push_back(verts[k]);
    const RangePoint& a = verts[k];
    const RangePoint& b = verts[(k + 1) % K];
    double gap = std::hypot(b.x - a.x, b.y - a.y);
    if (gap > gap_threshold) {
      for (int j = 1; j < J; ++j) {
        double f = static_cast<double>(j) / J;
        RangePoint q;
        q.t = a.t + f * (2.0 * M_PI / K);
        q.x = (1 - f) * a.x + f * b.x;
        q.y = (1 - f) * a.y + f * b.y;
        q.source = PointSource::interpolated;
        q.seg_lo = k;
        q.seg_hi = (k + 1) % K;
        out.points.push_back(q);
      }
    }
  }

  // Below Theorem-3 dimension the eigen-curve may miss parts of the range;
  // the canonical directions are at least certified members.
  if (n < 3) {
    for (int i = 0; i < n; ++i) {
      VectorXd v = VectorXd::Zero(n);
      v[i] = 1.0;
      RangePoint p = vertex_point(A, B, 2.0 * M_PI + i, v);
      out.points.push_back(p);
    }
  }
  return out;
}

const RangePoint& maximize_over_boundary(
    const BoundarySample& sample,
    const std::function<double(double, double)>& objective) {
  if (sample.points.empty())
    throw std::invalid_argument("maximize_over_boundary: empty sample");
  const RangePoint* best = nullptr;
  double best_val = 0;
  for (const auto& p : sample.points) {
    double v = objective(p.x, p.y);
    if (!std::isfinite(v))
      throw std::runtime_error(
          "maximize_over_boundary: objective non-finite at sample point");
    if (!best || v > best_val) {
      best = &p;
      best_val = v;
    }
  }
  return *best;
}

VectorXd reconstruct_generator(const MatrixXd& A, const MatrixXd& B,
                               const RangePoint& point,
                               const BoundarySample& sample,
                               bool* approximate) {
  if (approximate) *approximate = false;
  if (point.generator) return *point.generator;
  if (point.seg_lo < 0 || point.seg_hi < 0 ||
      point.seg_lo >= sample.grid_size || point.seg_hi >= sample.grid_size)
    throw std::invalid_argument("reconstruct_generator: point not in sample");

  const RangePoint& va = sample.points[sample.vertex_position[point.seg_lo]];
  const RangePoint& vb = sample.points[sample.vertex_position[point.seg_hi]];
  const VectorXd& u = *va.generator;
  VectorXd w = *vb.generator;
  w -= u.dot(w) * u;
  double wn = w.norm();

  const double tol = 1e-6;
  auto residual = [&](const VectorXd& v) {
    return std::max(std::abs(v.dot(A * v) - point.x),
                    std::abs(v.dot(B * v) - point.y));
  };

  VectorXd best_v;
  double best_res = std::numeric_limits<double>::infinity();
  if (wn > 1e-8) {
    w /= wn;
    // v(theta) = u cos + w sin; on a flat segment x(theta) varies
    // continuously between the endpoint values, so bisect on it.
    auto xval = [&](double th) {
      VectorXd v = std::cos(th) * u + std::sin(th) * w;
      return v.dot(A * v) - point.x;
    };
    const int grid = 256;
    double prev_th = 0, prev_f = xval(0);
    for (int i = 1; i <= grid; ++i) {
      double th = i * M_PI / grid;
      double f = xval(th);
      if ((prev_f <= 0 && f >= 0) || (prev_f >= 0 && f <= 0)) {
        double lo = prev_th, hi = th, flo = prev_f;
        for (int it = 0; it < 80; ++it) {
          double mid = 0.5 * (lo + hi), fm = xval(mid);
          if ((flo <= 0) == (fm <= 0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        double th_star = 0.5 * (lo + hi);
        VectorXd v = std::cos(th_star) * u + std::sin(th_star) * w;
        v.normalize();
        double r = residual(v);
        if (r < best_res) {
          best_res = r;
          best_v = v;
        }
      }
      prev_th = th;
      prev_f = f;
    }
  }

  if (best_res <= tol) {
    detail::sign_normalize_first(best_v);
    return best_v;
  }

  // nearest vertex fallback
  if (approximate) *approximate = true;
  double da = std::hypot(va.x - point.x, va.y - point.y);
  double db = std::hypot(vb.x - point.x, vb.y - point.y);
  return da <= db ? *va.generator : *vb.generator;
}

void dump_csv(const BoundarySample& sample, std::ostream& os) {
  os << "t,x,y,source\n";
  for (const auto& p : sample.points)
    os << p.t << ',' << p.x << ',' << p.y << ','
       << (p.source == PointSource::vertex ? "vertex" : "interpolated")
       << '\n';
}

}  // namespace sensel
