#include "sensel/io.hpp"

#include <fstream>

namespace sensel {

namespace {

json vec_to_json(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json mat_to_json(const MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(row);
  }
  return rows;
}

json k_to_json(double k) {
  if (std::isinf(k)) return "inf";
  return k;
}

double k_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInf;
    throw std::invalid_argument("k must be a number or \"inf\"");
  }
  return j.get<double>();
}

VectorXd vec_from_json(const json& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw std::invalid_argument("vector length mismatch");
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = j[i].get<double>();
  return v;
}

MatrixXd mat_from_json(const json& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw std::invalid_argument("matrix row count mismatch");
  MatrixXd M(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(j[i].size()) != n)
      throw std::invalid_argument("matrix column count mismatch");
    for (int c = 0; c < n; ++c) M(i, c) = j[i][c].get<double>();
  }
  return M;
}

}  // namespace

json instance_to_json(const ProblemInstance& instance) {
  return json{{"n", instance.pair.dim()},
              {"p", instance.p},
              {"m0", vec_to_json(instance.pair.m0)},
              {"m1", vec_to_json(instance.pair.m1)},
              {"S0", mat_to_json(instance.pair.S0)},
              {"S1", mat_to_json(instance.pair.S1)},
              {"k0", k_to_json(instance.uncertainty.k0)},
              {"k1", k_to_json(instance.uncertainty.k1)}};
}

ProblemInstance instance_from_json(const json& j) {
  ProblemInstance inst;
  const int n = j.at("n").get<int>();
  inst.p = j.at("p").get<int>();
  inst.pair.m0 = vec_from_json(j.at("m0"), n);
  inst.pair.m1 = vec_from_json(j.at("m1"), n);
  inst.pair.S0 = mat_from_json(j.at("S0"), n);
  inst.pair.S1 = mat_from_json(j.at("S1"), n);
  inst.uncertainty.k0 = k_from_json(j.at("k0"));
  inst.uncertainty.k1 = k_from_json(j.at("k1"));
  inst.validate();
  return inst;
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  json j;
  in >> j;
  return instance_from_json(j);
}

void save_instance(const ProblemInstance& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file: " + path);
  out << instance_to_json(instance).dump(2) << '\n';
}

json result_to_json(const PipelineResult& result) {
  json phases = json::array();
  for (const auto& ph : result.phase_trace)
    phases.push_back({{"name", ph.name},
                      {"objective", ph.objective},
                      {"millis", ph.millis}});
  return json{{"selection", result.selection.indices},
              {"objective", result.objective},
              {"stiefel_objective", result.stiefel_objective},
              {"phases", phases},
              {"version", SENSEL_VERSION}};
}

}  // namespace sensel
