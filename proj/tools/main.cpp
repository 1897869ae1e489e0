#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include "sensel/evaluation.hpp"
#include "sensel/instancegen.hpp"
#include "sensel/io.hpp"
#include "sensel/meandiff.hpp"
#include "sensel/rng.hpp"
#include "sensel/rounding.hpp"

using namespace sensel;

namespace {

struct Config {
  std::string mode = "solve";
  int n = 10;
  int p = 3;
  double p_frac = -1;
  std::string criterion = "both";  // kl | c | both
  std::string algorithm = "both";  // r | md | both
  std::string k_rule = "infinity";  // infinity | drift | paper-det | k0,k1
  int instances = 50;
  int trials = 100000;
  std::uint64_t seed = 1;
  std::uint64_t oracle_cap = 2000000;
  std::uint64_t random_budget = 100000;
  std::string out;
  std::string format = "csv";
  std::string instance_path;
  std::string graph = "complete:4";

  json to_json() const {
    return {{"mode", mode},       {"n", n},
            {"p", p},             {"p_frac", p_frac},
            {"criterion", criterion}, {"algorithm", algorithm},
            {"k_rule", k_rule},   {"instances", instances},
            {"trials", trials},   {"seed", seed},
            {"oracle_cap", oracle_cap}, {"random_budget", random_budget},
            {"format", format},   {"instance", instance_path},
            {"graph", graph},     {"version", SENSEL_VERSION}};
  }
};

KRule parse_k_rule(const std::string& s) {
  if (s == "infinity" || s == "inf") return KRule::none();
  if (s == "drift") return KRule::drift_fraction();
  if (s == "paper-det") return KRule::det_fraction();
  auto comma = s.find(',');
  if (comma != std::string::npos)
    return KRule::fixed(std::stod(s.substr(0, comma)),
                        std::stod(s.substr(comma + 1)));
  throw CLI::ValidationError("--k-rule", "expected infinity|drift|paper-det|k0,k1");
}

SimpleGraph parse_graph(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos)
    throw CLI::ValidationError("--graph", "expected kind:n or file:path");
  std::string kind = s.substr(0, colon), arg = s.substr(colon + 1);
  if (kind == "complete") return SimpleGraph::complete(std::stoi(arg));
  if (kind == "path") return SimpleGraph::path(std::stoi(arg));
  if (kind == "cycle") return SimpleGraph::cycle(std::stoi(arg));
  if (kind == "edgeless") return SimpleGraph::edgeless(std::stoi(arg));
  if (kind == "file") {
    // format: first line n, then one "i j" edge per line
    std::ifstream in(arg);
    if (!in) throw CLI::ValidationError("--graph", "cannot open " + arg);
    SimpleGraph g;
    in >> g.n_vertices;
    int a, b;
    while (in >> a >> b) g.edges.push_back({a, b});
    g.validate();
    return g;
  }
  throw CLI::ValidationError("--graph", "unknown graph kind " + kind);
}

struct Out {
  std::ofstream file;
  std::ostream& os;
  explicit Out(const std::string& path)
      : file(path.empty() ? std::ofstream() : std::ofstream(path)),
        os(path.empty() ? std::cout : file) {
    if (!path.empty() && !file)
      throw std::runtime_error("cannot open output file: " + path);
  }
};

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::vector<ProblemInstance> make_suite(const Config& cfg) {
  std::vector<ProblemInstance> suite;
  if (!cfg.instance_path.empty()) {
    suite.push_back(load_instance(cfg.instance_path));
    return suite;
  }
  int p = cfg.p_frac > 0 ? std::max(1, (int)std::lround(cfg.p_frac * cfg.n))
                         : cfg.p;
  KRule rule = parse_k_rule(cfg.k_rule);
  for (int i = 0; i < cfg.instances; ++i)
    suite.push_back(
        generate_instance(cfg.n, p, mix_seed(cfg.seed, 0xA11, i), rule));
  return suite;
}

struct AlgoRun {
  std::string name;
  double objective = 0;
  double millis = 0;
};

std::vector<AlgoRun> run_algorithms(const ProblemInstance& inst,
                                    const Config& cfg) {
  bool want_r = cfg.algorithm != "md";
  bool want_md = cfg.algorithm != "r" && inst.uncertainty.exact();
  bool want_kl = cfg.criterion != "c";
  bool want_c = cfg.criterion != "kl";
  std::vector<AlgoRun> runs;
  auto add = [&](const std::string& name, auto&& fn) {
    double t0 = now_ms();
    PipelineResult r = fn(inst);
    runs.push_back({name, r.objective, now_ms() - t0});
  };
  if (want_r && want_kl) add("r_kl", [](const auto& i) { return r_kl(i); });
  if (want_r && want_c) add("r_c", [](const auto& i) { return r_c(i); });
  if (want_md && want_kl) add("md_kl", [](const auto& i) { return md_kl(i); });
  if (want_md && want_c) add("md_c", [](const auto& i) { return md_c(i); });
  return runs;
}

void emit_table(const Config& cfg, const std::vector<std::string>& cols,
                const std::vector<std::vector<double>>& rows, Out& out) {
  // per-column summary recomputable from the emitted rows
  auto col_stats = [&](std::size_t c) {
    double mx = -1e300, mn = 1e300, sum = 0, sq = 0;
    for (const auto& r : rows) {
      mx = std::max(mx, r[c]);
      mn = std::min(mn, r[c]);
      sum += r[c];
      sq += r[c] * r[c];
    }
    double avg = sum / rows.size();
    double var = sq / rows.size() - avg * avg;
    return std::array<double, 4>{mx, avg, mn, std::sqrt(std::max(var, 0.0))};
  };
  if (cfg.format == "json") {
    json j{{"config", cfg.to_json()}, {"columns", cols}, {"rows", rows}};
    json summary;
    for (std::size_t c = 1; c < cols.size(); ++c) {
      auto st = col_stats(c);
      summary[cols[c]] = {{"max", st[0]}, {"avg", st[1]}, {"min", st[2]},
                          {"dev", st[3]}};
    }
    j["summary"] = summary;
    out.os << j.dump(2) << '\n';
    return;
  }
  out.os << "# config " << cfg.to_json().dump() << '\n';
  for (std::size_t c = 0; c < cols.size(); ++c)
    out.os << (c ? "," : "") << cols[c];
  out.os << '\n';
  out.os.precision(12);
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) out.os << (c ? "," : "") << r[c];
    out.os << '\n';
  }
  const char* stat_names[4] = {"max", "avg", "min", "dev"};
  for (int sidx = 0; sidx < 4; ++sidx) {
    out.os << stat_names[sidx];
    for (std::size_t c = 1; c < cols.size(); ++c)
      out.os << ',' << col_stats(c)[sidx];
    out.os << '\n';
  }
}

int mode_solve(const Config& cfg) {
  auto suite = make_suite(cfg);
  Out out(cfg.out);
  json reports = json::array();
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const auto& inst = suite[i];
    json entry{{"instance", instance_to_json(inst)}};
    bool want_r = cfg.algorithm != "md";
    bool want_md = cfg.algorithm != "r" && inst.uncertainty.exact();
    if (want_r && cfg.criterion != "c") entry["r_kl"] = result_to_json(r_kl(inst));
    if (want_r && cfg.criterion != "kl") entry["r_c"] = result_to_json(r_c(inst));
    if (want_md && cfg.criterion != "c") entry["md_kl"] = result_to_json(md_kl(inst));
    if (want_md && cfg.criterion != "kl") entry["md_c"] = result_to_json(md_c(inst));
    reports.push_back(std::move(entry));
  }
  out.os << json{{"config", cfg.to_json()}, {"results", reports}}.dump(2)
         << '\n';
  return 0;
}

int mode_oracle_compare(const Config& cfg) {
  auto suite = make_suite(cfg);
  std::vector<std::string> cols{"instance"};
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const auto& inst = suite[i];
    double opt_kl = 0, opt_c = 0;
    if (cfg.criterion != "c")
      opt_kl = exhaustive_opt(inst, Criterion::KL, cfg.oracle_cap).second;
    if (cfg.criterion != "kl")
      opt_c = exhaustive_opt(inst, Criterion::Chernoff, cfg.oracle_cap).second;
    std::vector<double> row{static_cast<double>(i)};
    for (const auto& run : run_algorithms(inst, cfg)) {
      if (i == 0) cols.push_back("r_" + run.name);
      double opt = run.name.ends_with("kl") ? opt_kl : opt_c;
      row.push_back(opt > 0 ? run.objective / opt : 1.0);
    }
    rows.push_back(std::move(row));
  }
  Out out(cfg.out);
  emit_table(cfg, cols, rows, out);
  return 0;
}

double best_random(const ProblemInstance& inst, Criterion crit,
                   std::uint64_t budget, std::uint64_t seed) {
  const int n = inst.pair.dim(), p = inst.p;
  // exact enumeration when the subset count fits in the budget
  std::uint64_t count = 1;
  bool small = true;
  for (int i = 1; i <= p; ++i) {
    count = count * (n - p + i) / i;
    if (count > budget) { small = false; break; }
  }
  if (small) return exhaustive_opt(inst, crit, budget).second;
  Rng rng(mix_seed(seed, 0xBE57, n));
  std::vector<int> all(n);
  double best = -1e300;
  for (std::uint64_t t = 0; t < budget; ++t) {
    std::iota(all.begin(), all.end(), 1);
    for (int i = 0; i < p; ++i)
      std::swap(all[i], all[i + rng.next_u64() % (n - i)]);
    std::vector<int> idx(all.begin(), all.begin() + p);
    best = std::max(best, worst_case(crit, SelectionMatrix::of(idx).to_basis(n),
                                     inst.pair, inst.uncertainty));
  }
  return best;
}

int mode_random_compare(const Config& cfg) {
  auto suite = make_suite(cfg);
  std::vector<std::string> cols{"instance"};
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const auto& inst = suite[i];
    std::map<std::string, std::pair<double, double>> best;  // value, millis
    for (const char* c : {"kl", "c"}) {
      if (cfg.criterion != "both" && cfg.criterion != c) continue;
      double t0 = now_ms();
      double v = best_random(inst,
                             std::string(c) == "kl" ? Criterion::KL
                                                    : Criterion::Chernoff,
                             cfg.random_budget, mix_seed(cfg.seed, 0xF00D, i));
      best[c] = {v, now_ms() - t0};
    }
    std::vector<double> row{static_cast<double>(i)};
    for (const auto& run : run_algorithms(inst, cfg)) {
      auto [bv, bt] = best[run.name.ends_with("kl") ? "kl" : "c"];
      if (i == 0) {
        cols.push_back("rho_" + run.name);
        cols.push_back("time_ratio_" + run.name);
      }
      row.push_back(bv > 0 ? run.objective / bv : 1.0);
      row.push_back(run.millis / std::max(bt, 1e-9));
    }
    rows.push_back(std::move(row));
  }
  Out out(cfg.out);
  emit_table(cfg, cols, rows, out);
  return 0;
}

int mode_detection_eval(const Config& cfg) {
  Config one = cfg;
  one.instances = 1;
  ProblemInstance inst = make_suite(one).front();
  const int n = inst.pair.dim(), p = inst.p;
  // enumerate all selections
  std::vector<std::vector<int>> sels;
  std::vector<int> idx(p);
  std::iota(idx.begin(), idx.end(), 1);
  while (true) {
    sels.push_back(idx);
    int j = p - 1;
    while (j >= 0 && idx[j] == n - p + 1 + j) --j;
    if (j < 0) break;
    ++idx[j];
    for (int i = j + 1; i < p; ++i) idx[i] = idx[i - 1] + 1;
  }
  if (sels.size() > cfg.oracle_cap)
    throw std::runtime_error("detection-eval: C(n,p) exceeds --oracle-cap");

  Out out(cfg.out);
  out.os << "# config " << cfg.to_json().dump() << '\n';
  out.os << "selection,kl,chernoff,pe\n";
  out.os.precision(12);
  std::vector<DetectionStats> stats;
  std::vector<double> pes, kls, cs;
  for (std::size_t i = 0; i < sels.size(); ++i) {
    SelectionMatrix sel = SelectionMatrix::of(sels[i]);
    DetectionStats st = estimate_roc(sel, inst.pair, cfg.trials,
                                     mix_seed(cfg.seed, 0xDE7, i));
    double kl = kl_distance(inst.pair, sel);
    double c = chernoff_distance(inst.pair, sel.to_basis(n)).value;
    std::string name;
    for (int v : sels[i]) name += (name.empty() ? "" : "+") + std::to_string(v);
    out.os << name << ',' << kl << ',' << c << ',' << st.pe << '\n';
    stats.push_back(std::move(st));
    pes.push_back(stats.back().pe);
    kls.push_back(kl);
    cs.push_back(c);
  }
  auto argbest = [](const std::vector<double>& v, bool max) {
    return max ? std::max_element(v.begin(), v.end()) - v.begin()
               : std::min_element(v.begin(), v.end()) - v.begin();
  };
  out.os << "# kl_best " << argbest(kls, true) << " c_best "
         << argbest(cs, true) << " bayes_best " << argbest(pes, false)
         << " worst " << argbest(pes, true) << " avg_pe "
         << std::accumulate(pes.begin(), pes.end(), 0.0) / pes.size() << '\n';

  if (!cfg.out.empty()) {
    std::ofstream roc(cfg.out + ".roc.csv");
    roc << "selection,threshold,pfa,pd\n";
    roc.precision(12);
    for (std::size_t i = 0; i < sels.size(); ++i)
      for (std::size_t k = 0; k < stats[i].thresholds.size(); ++k)
        roc << i << ',' << stats[i].thresholds[k] << ',' << stats[i].pfa[k]
            << ',' << stats[i].pd[k] << '\n';
    // pointwise upper envelope over a common pfa grid
    for (int g = 0; g <= 100; ++g) {
      double pfa = g / 100.0;
      double env = 0;
      for (auto& st : stats) env = std::max(env, interpolate_pd(st, pfa));
      roc << "envelope," << 0 << ',' << pfa << ',' << env << '\n';
    }
  }
  return 0;
}

int mode_hardness(const Config& cfg) {
  SimpleGraph g = parse_graph(cfg.graph);
  const int n = g.n_vertices, p = cfg.p;
  ProblemInstance inst = hardness_instance(g, p);
  auto [sel, opt] = exhaustive_opt(inst, Criterion::KL, cfg.oracle_cap);
  double threshold = 0.5 * p / (2.0 * n - p + 1);
  bool clique_by_threshold = opt >= threshold - 1e-9;
  bool clique_by_enum = has_clique(g, p);
  Out out(cfg.out);
  json j{{"config", cfg.to_json()},
         {"n", n},
         {"p", p},
         {"optimum", opt},
         {"threshold", threshold},
         {"optimal_selection", sel.indices},
         {"clique_found", clique_by_threshold},
         {"clique_brute_force", clique_by_enum}};
  out.os << j.dump(2) << '\n';
  return clique_by_threshold == clique_by_enum ? 0 : 3;
}

int mode_sweep(const Config& cfg) {
  // oracle-compare over n = 4..cfg.n with p from --p-frac (or fixed --p)
  std::vector<std::string> cols{"n", "p"};
  std::vector<std::vector<double>> rows;
  bool first = true;
  for (int n = 4; n <= cfg.n; ++n) {
    Config cell = cfg;
    cell.n = n;
    int p = cfg.p_frac > 0 ? std::max(1, (int)std::lround(cfg.p_frac * n))
                           : std::min(cfg.p, n);
    cell.p = p;
    cell.p_frac = -1;
    auto suite = make_suite(cell);
    std::map<std::string, std::pair<double, int>> acc;
    for (const auto& inst : suite) {
      double opt_kl = cfg.criterion != "c"
          ? exhaustive_opt(inst, Criterion::KL, cfg.oracle_cap).second : 0;
      double opt_c = cfg.criterion != "kl"
          ? exhaustive_opt(inst, Criterion::Chernoff, cfg.oracle_cap).second : 0;
      for (const auto& run : run_algorithms(inst, cell)) {
        double opt = run.name.ends_with("kl") ? opt_kl : opt_c;
        auto& a = acc["avg_r_" + run.name];
        a.first += opt > 0 ? run.objective / opt : 1.0;
        a.second += 1;
      }
    }
    std::vector<double> row{(double)n, (double)p};
    for (auto& [name, a] : acc) {
      if (first) cols.push_back(name);
      row.push_back(a.first / a.second);
    }
    first = false;
    rows.push_back(std::move(row));
  }
  Out out(cfg.out);
  emit_table(cfg, cols, rows, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  CLI::App app{"Sensor selection for Gaussian hypothesis testing"};
  app.add_option("--mode", cfg.mode)
      ->check(CLI::IsMember({"solve", "oracle-compare", "random-compare",
                             "detection-eval", "hardness", "sweep"}));
  app.add_option("--n", cfg.n)->check(CLI::PositiveNumber);
  app.add_option("--p", cfg.p)->check(CLI::PositiveNumber);
  app.add_option("--p-frac", cfg.p_frac);
  app.add_option("--criterion", cfg.criterion)
      ->check(CLI::IsMember({"kl", "c", "both"}));
  app.add_option("--algorithm", cfg.algorithm)
      ->check(CLI::IsMember({"r", "md", "both"}));
  app.add_option("--k-rule", cfg.k_rule);
  app.add_option("--instances", cfg.instances)->check(CLI::PositiveNumber);
  app.add_option("--trials", cfg.trials)->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed);
  app.add_option("--oracle-cap", cfg.oracle_cap);
  app.add_option("--random-budget", cfg.random_budget);
  app.add_option("--out", cfg.out);
  app.add_option("--format", cfg.format)->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--instance", cfg.instance_path);
  app.add_option("--graph", cfg.graph);
  CLI11_PARSE(app, argc, argv);

  try {
    if (cfg.mode == "solve") return mode_solve(cfg);
    if (cfg.mode == "oracle-compare") return mode_oracle_compare(cfg);
    if (cfg.mode == "random-compare") return mode_random_compare(cfg);
    if (cfg.mode == "detection-eval") return mode_detection_eval(cfg);
    if (cfg.mode == "hardness") return mode_hardness(cfg);
    if (cfg.mode == "sweep") return mode_sweep(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
