#pragma once

// JSON mapping of run configurations, metrics and oracle reports. Field
// names mirror the C++ structs.

#include <string>
#include <vector>

#include <json.hpp>

#include "cq/harness.hpp"

namespace cq {

using Json = nlohmann::json;

/// Missing fields keep their defaults; unknown fields and type errors raise
/// ConfigError.
RunConfig run_config_from_json(const Json& j);
Json to_json(const RunConfig& config);
Json to_json(const Metrics& metrics);
Json to_json(const OracleReport& report);

RunConfig load_run_config(const std::string& path);

/// A sweep file is either an array of run configs or an object
/// {"base": {...}, "runs": [{...}, ...]} where each run is merge-patched onto
/// the base.
std::vector<RunConfig> load_sweep_configs(const std::string& path);
std::vector<RunConfig> sweep_configs_from_json(const Json& j);

}  // namespace cq
