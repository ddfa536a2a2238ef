#pragma once

#include "camikit/kernel/params.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace camikit {

struct PipelineStep {
  std::string action;
  /// Symbolic names bound to initial components or earlier step outputs.
  std::vector<std::string> inputs;
  /// Typed against the action's schema when the step runs.
  nlohmann::json params = nlohmann::json::object();
  std::vector<std::string> outputs;
};

struct Pipeline {
  std::string name;
  std::vector<PipelineStep> steps;
  /// Optional name -> file path bindings carried by pipeline files.
  std::map<std::string, std::string> file_bindings;
};

enum class StepStatus { ok, failed, skipped };

std::string_view to_string(StepStatus status) noexcept;

struct StepReport {
  std::string action;
  StepStatus status = StepStatus::skipped;
  std::vector<std::uint64_t> produced;
  std::int64_t duration_ms = 0;
  std::string error;
};

struct RunReport {
  std::string pipeline;
  std::vector<StepReport> steps;
  std::int64_t total_duration_ms = 0;

  bool ok() const noexcept;
};

/// Parses the pipeline JSON document:
/// {"name": ..., "bindings": {name: path}, "steps": [{"action", "inputs",
/// "params", "outputs"}]}. Unknown keys are rejected.
Pipeline parse_pipeline(std::string_view json_text);
nlohmann::json to_json(const Pipeline& pipeline);
nlohmann::json to_json(const RunReport& report);

} // namespace camikit
