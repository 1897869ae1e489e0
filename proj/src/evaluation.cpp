#include "sensel/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sensel/distances.hpp"
#include "sensel/rng.hpp"

namespace sensel {

namespace {

std::uint64_t binomial(int n, int p, std::uint64_t cap) {
  std::uint64_t c = 1;
  for (int i = 1; i <= p; ++i) {
    c = c * (n - p + i) / i;
    if (c > 100 * cap) return c;  // avoid overflow for silly inputs
  }
  return c;
}

}  // namespace

std::pair<SelectionMatrix, double> exhaustive_opt(
    const ProblemInstance& instance, Criterion criterion, std::uint64_t cap) {
  instance.validate();
  const int n = instance.pair.dim(), p = instance.p;
  if (binomial(n, p, cap) > cap)
    throw std::runtime_error("exhaustive_opt: C(n,p) exceeds cap");

  std::vector<int> idx(p);
  std::iota(idx.begin(), idx.end(), 1);
  std::vector<int> best_idx;
  double best_val = -std::numeric_limits<double>::infinity();
  while (true) {
    double v = worst_case(criterion, SelectionMatrix::of(idx).to_basis(n),
                          instance.pair, instance.uncertainty);
    if (v > best_val) {
      best_val = v;
      best_idx = idx;
    }
    // next lexicographic combination
    int j = p - 1;
    while (j >= 0 && idx[j] == n - p + 1 + j) --j;
    if (j < 0) break;
    ++idx[j];
    for (int i = j + 1; i < p; ++i) idx[i] = idx[i - 1] + 1;
  }
  return {SelectionMatrix::of(best_idx), best_val};
}

namespace {

constexpr int kBlockSize = 4096;

// Projected-pair LLR machinery shared by pe / roc estimation.
struct Detector {
  VectorXd m0, m1;
  MatrixXd L0, L1;        // Cholesky factors for sampling
  MatrixXd P0, P1;        // precision matrices
  double log_det_ratio;   // log |S0| / |S1|

  explicit Detector(const GaussianPair& proj) {
    m0 = proj.m0;
    m1 = proj.m1;
    Eigen::LLT<MatrixXd> l0(proj.S0), l1(proj.S1);
    if (l0.info() != Eigen::Success || l1.info() != Eigen::Success)
      throw std::runtime_error("detector: projected covariance not PD");
    L0 = l0.matrixL();
    L1 = l1.matrixL();
    const int p = static_cast<int>(m0.size());
    MatrixXd I = MatrixXd::Identity(p, p);
    P0 = l0.solve(I);
    P1 = l1.solve(I);
    log_det_ratio = detail::logdet_spd(proj.S0) - detail::logdet_spd(proj.S1);
  }

  double llr(const VectorXd& y) const {
    VectorXd d0 = y - m0, d1 = y - m1;
    return 0.5 * (d0.dot(P0 * d0) - d1.dot(P1 * d1)) + 0.5 * log_det_ratio;
  }
};

// trials/2 LLR draws under hypothesis `hyp`; blockwise seeding keeps the
// stream independent of any evaluation schedule.
std::vector<double> llr_samples(const Detector& det, const Detector& truth,
                                int hyp, int count, std::uint64_t seed) {
  const VectorXd& mean = hyp == 0 ? truth.m0 : truth.m1;
  const MatrixXd& L = hyp == 0 ? truth.L0 : truth.L1;
  const int p = static_cast<int>(mean.size());
  std::vector<double> out(count);
  VectorXd z(p);
  for (int base = 0; base < count; base += kBlockSize) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(hyp),
                     static_cast<std::uint64_t>(base / kBlockSize)));
    int hi = std::min(base + kBlockSize, count);
    for (int t = base; t < hi; ++t) {
      for (int i = 0; i < p; ++i) z[i] = rng.normal();
      out[t] = det.llr(mean + L * z);
    }
  }
  return out;
}

double pe_from(const std::vector<double>& llr0, const std::vector<double>& llr1) {
  std::size_t err = 0;
  for (double v : llr0) err += v > 0;   // false alarm
  for (double v : llr1) err += !(v > 0);  // miss
  return static_cast<double>(err) / (llr0.size() + llr1.size());
}

}  // namespace

double estimate_pe_mismatched(const SelectionMatrix& sel,
                              const GaussianPair& detector_pair,
                              const GaussianPair& true_pair, int trials,
                              std::uint64_t seed) {
  if (trials < 2) throw std::invalid_argument("estimate_pe: trials >= 2");
  Detector det(project_pair(detector_pair, sel));
  Detector truth(project_pair(true_pair, sel));
  int per = trials / 2;
  auto l0 = llr_samples(det, truth, 0, per, seed);
  auto l1 = llr_samples(det, truth, 1, per, seed);
  return pe_from(l0, l1);
}

double estimate_pe(const SelectionMatrix& sel, const GaussianPair& pair,
                   int trials, std::uint64_t seed) {
  return estimate_pe_mismatched(sel, pair, pair, trials, seed);
}

DetectionStats estimate_roc(const SelectionMatrix& sel,
                            const GaussianPair& pair, int trials,
                            std::uint64_t seed, int grid) {
  if (trials < 2 || grid < 2) throw std::invalid_argument("estimate_roc: args");
  Detector det(project_pair(pair, sel));
  int per = trials / 2;
  auto l0 = llr_samples(det, det, 0, per, seed);
  auto l1 = llr_samples(det, det, 1, per, seed);

  DetectionStats st;
  st.trials = trials;
  st.seed = seed;
  st.pe = pe_from(l0, l1);

  std::vector<double> pool;
  pool.reserve(l0.size() + l1.size());
  pool.insert(pool.end(), l0.begin(), l0.end());
  pool.insert(pool.end(), l1.begin(), l1.end());
  std::sort(pool.begin(), pool.end());
  // quantile-spaced thresholds, descending so pfa is increasing
  st.thresholds.resize(grid);
  for (int i = 0; i < grid; ++i) {
    double q = (i + 0.5) / grid;
    st.thresholds[i] =
        pool[static_cast<std::size_t>(q * (pool.size() - 1) + 0.5)];
  }
  std::sort(st.thresholds.rbegin(), st.thresholds.rend());

  std::sort(l0.begin(), l0.end());
  std::sort(l1.begin(), l1.end());
  auto frac_above = [](const std::vector<double>& v, double g) {
    auto it = std::upper_bound(v.begin(), v.end(), g);
    return static_cast<double>(v.end() - it) / v.size();
  };
  st.pfa.resize(grid);
  st.pd.resize(grid);
  double run = 0;
  for (int i = 0; i < grid; ++i) {
    st.pfa[i] = frac_above(l0, st.thresholds[i]);
    run = std::max(run, frac_above(l1, st.thresholds[i]));
    st.pd[i] = run;
  }
  return st;
}

double interpolate_pd(const DetectionStats& stats, double pfa, bool* clamped) {
  if (clamped) *clamped = false;
  const auto& x = stats.pfa;
  const auto& y = stats.pd;
  if (x.empty()) throw std::invalid_argument("interpolate_pd: empty stats");
  if (pfa <= x.front()) {
    if (clamped) *clamped = pfa < x.front();
    return y.front();
  }
  if (pfa >= x.back()) {
    if (clamped) *clamped = pfa > x.back();
    return y.back();
  }
  auto it = std::lower_bound(x.begin(), x.end(), pfa);
  std::size_t hi = it - x.begin(), lo = hi - 1;
  while (lo > 0 && x[lo] == x[hi]) --lo;  // skip zero-width steps
  if (x[hi] == x[lo]) return y[hi];
  double w = (pfa - x[lo]) / (x[hi] - x[lo]);
  return y[lo] + w * (y[hi] - y[lo]);
}

void dump_roc_csv(const DetectionStats& stats, std::ostream& os) {
  os << "threshold,pfa,pd\n";
  for (std::size_t i = 0; i < stats.thresholds.size(); ++i)
    os << stats.thresholds[i] << ',' << stats.pfa[i] << ',' << stats.pd[i]
       << '\n';
}

SimpleGraph SimpleGraph::complete(int n) {
  SimpleGraph g{n, {}};
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) g.edges.push_back({i, j});
  return g;
}

SimpleGraph SimpleGraph::path(int n) {
  SimpleGraph g{n, {}};
  for (int i = 1; i < n; ++i) g.edges.push_back({i, i + 1});
  return g;
}

SimpleGraph SimpleGraph::cycle(int n) {
  SimpleGraph g = path(n);
  if (n >= 3) g.edges.push_back({1, n});
  return g;
}

SimpleGraph SimpleGraph::edgeless(int n) { return {n, {}}; }

void SimpleGraph::validate() const {
  for (auto [i, j] : edges)
    if (i < 1 || j < 1 || i > n_vertices || j > n_vertices || i == j)
      throw std::invalid_argument("SimpleGraph: bad edge");
}

MatrixXd clique_matrix(const SimpleGraph& g) {
  g.validate();
  const int n = g.n_vertices;
  MatrixXd S = 2.0 * n * MatrixXd::Identity(n, n);
  for (auto [i, j] : g.edges) S(i - 1, j - 1) = S(j - 1, i - 1) = -1.0;
  return S;
}

double sei(const MatrixXd& A) {
  detail::check_symmetric(A, 1e-9, "A");
  VectorXd ones = VectorXd::Ones(A.rows());
  return ones.dot(A.ldlt().solve(ones));
}

ProblemInstance hardness_instance(const SimpleGraph& g, int p) {
  const int n = g.n_vertices;
  ProblemInstance inst;
  inst.pair.m0 = VectorXd::Zero(n);
  inst.pair.m1 = VectorXd::Ones(n);
  inst.pair.S0 = inst.pair.S1 = clique_matrix(g);
  inst.p = p;
  return inst;
}

bool has_clique(const SimpleGraph& g, int p) {
  g.validate();
  const int n = g.n_vertices;
  if (p <= 1) return p == 1 ? n >= 1 : true;
  std::vector<std::vector<bool>> adj(n + 1, std::vector<bool>(n + 1, false));
  for (auto [i, j] : g.edges) adj[i][j] = adj[j][i] = true;
  std::vector<int> idx(p);
  std::iota(idx.begin(), idx.end(), 1);
  while (true) {
    bool ok = true;
    for (int a = 0; a < p && ok; ++a)
      for (int b = a + 1; b < p && ok; ++b) ok = adj[idx[a]][idx[b]];
    if (ok) return true;
    int j = p - 1;
    while (j >= 0 && idx[j] == n - p + 1 + j) --j;
    if (j < 0) return false;
    ++idx[j];
    for (int i = j + 1; i < p; ++i) idx[i] = idx[i - 1] + 1;
  }
}

std::array<double, 4> submodularity_counterexample(double epsilon) {
  if (!(epsilon > 0) || !(epsilon < 1))
    throw std::invalid_argument("epsilon must be in (0,1)");
  GaussianPair pair;
  pair.m0 = pair.m1 = VectorXd::Zero(3);
  pair.S0 = MatrixXd::Identity(3, 3);
  pair.S1 = MatrixXd::Identity(3, 3);
  pair.S1(1, 2) = pair.S1(2, 1) = epsilon;
  auto f = [&](std::vector<int> idx) {
    return kl_distance(pair, SelectionMatrix::of(std::move(idx)).to_basis(3));
  };
  return {f({1}), f({1, 2}), f({1, 3}), f({1, 2, 3})};
}

}  // namespace sensel
