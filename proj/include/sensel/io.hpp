#pragma once

#include <json.hpp>
#include <string>

#include "sensel/rounding.hpp"
#include "sensel/types.hpp"

#define SENSEL_VERSION "0.1.0"

namespace sensel {

using nlohmann::json;

// {n, p, m0, m1, S0, S1 (row-major nested), k0, k1 (number or "inf")}
json instance_to_json(const ProblemInstance& instance);
ProblemInstance instance_from_json(const json& j);

ProblemInstance load_instance(const std::string& path);
void save_instance(const ProblemInstance& instance, const std::string& path);

// {selection (1-based), objective, stiefel_objective, phases[{name,
//  objective, millis}]}
json result_to_json(const PipelineResult& result);

}  // namespace sensel
