#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlf/conditions.hpp"
#include "nlf/kernels.hpp"
#include "nlf/types.hpp"

namespace nlf {

/// Configuration that does not match the versioned schema.
class SchemaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Task { CheckConditions, Compare, CheckB, Spectral, Solve, Holder, ThornDemo };

const char* to_string(Task t);
Task task_from_string(const std::string& s);

inline constexpr int kSchemaVersion = 1;

/// {"family": "fractional" | "masked" | "thorn" | "table", "d": int, "alpha": double, "params": {...}}
///   fractional: params.c in (0, 1], default 1
///   masked:     params.base, a kernel object (default: the fractional kernel of the same d, alpha)
///   thorn:      d = 2, params.b in (0, 1)
///   table:      params.points = [[r, value], ...], r strictly increasing, value > 0
KernelSpec kernel_from_json(const nlohmann::json& j);

struct ExperimentConfig {
  Task task = Task::Compare;
  nlohmann::json kernel_json;           // as given, echoed into reports
  std::optional<KernelSpec> kernel;     // absent only for thorn-demo
  double alpha = std::numeric_limits<double>::quiet_NaN();
  QuadratureBudget budget;
  std::string out_dir = ".";
  unsigned seed = 1;
  int threads = 1;
  nlohmann::json params = nlohmann::json::object();
};

/// Validates against schema 1; throws SchemaError with a diagnostic.
ExperimentConfig parse_config(const nlohmann::json& j);
/// Reads and parses a config file.
ExperimentConfig load_config(const std::string& path);

struct RunResult {
  int exit_code = 2;                // 0 pass, 1 some fail, 2 inconclusive, 3 schema error
  std::vector<std::string> files;   // written report paths
  nlohmann::json summary;
};

int exit_code(Verdict v);
/// 1 if any verdict fails, else 2 if any is inconclusive, else 0.
Verdict combine(const std::vector<Verdict>& vs);

/// Dispatches the task and writes its reports below config.out_dir. Schema
/// and domain errors map to exit code 3, numerical breakdown to 2.
RunResult run(const ExperimentConfig& config);

}  // namespace nlf
