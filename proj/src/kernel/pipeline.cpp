#include "camikit/kernel/pipeline.hpp"

#include "camikit/error.hpp"

#include <set>

namespace camikit {

std::string_view to_string(StepStatus status) noexcept {
  switch (status) {
  case StepStatus::ok: return "ok";
  case StepStatus::failed: return "failed";
  case StepStatus::skipped: return "skipped";
  }
  return "?";
}

bool RunReport::ok() const noexcept {
  for (const auto& s : steps)
    if (s.status != StepStatus::ok)
      return false;
  return true;
}

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::MalformedPipeline, what);
}

void only_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
               const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key))
      malformed(where + ": unknown key '" + key + "'");
}

std::vector<std::string> string_list(const nlohmann::json& obj, const char* key,
                                     const std::string& where) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end())
    return out;
  if (!it->is_array())
    malformed(where + ": '" + key + "' must be an array of strings");
  for (const auto& e : *it) {
    if (!e.is_string() || e.get<std::string>().empty())
      malformed(where + ": '" + key + "' must be an array of non-empty strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

} // namespace

Pipeline parse_pipeline(std::string_view json_text) {
  auto j = nlohmann::json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (j.is_discarded())
    malformed("not valid JSON");
  if (!j.is_object())
    malformed("pipeline must be a JSON object");
  only_keys(j, {"name", "bindings", "steps"}, "pipeline");

  Pipeline p;
  if (auto it = j.find("name"); it != j.end()) {
    if (!it->is_string())
      malformed("pipeline: 'name' must be a string");
    p.name = it->get<std::string>();
  }
  if (auto it = j.find("bindings"); it != j.end()) {
    if (!it->is_object())
      malformed("pipeline: 'bindings' must be an object");
    for (const auto& [name, path] : it->items()) {
      if (!path.is_string())
        malformed("pipeline: binding '" + name + "' must be a path string");
      p.file_bindings.emplace(name, path.get<std::string>());
    }
  }
  auto steps = j.find("steps");
  if (steps == j.end() || !steps->is_array())
    malformed("pipeline: 'steps' must be an array");
  for (std::size_t i = 0; i < steps->size(); ++i) {
    const auto& s = (*steps)[i];
    const auto where = "step " + std::to_string(i);
    if (!s.is_object())
      malformed(where + ": must be an object");
    only_keys(s, {"action", "inputs", "params", "outputs"}, where);
    PipelineStep step;
    auto action = s.find("action");
    if (action == s.end() || !action->is_string())
      malformed(where + ": 'action' must be a string");
    step.action = action->get<std::string>();
    step.inputs = string_list(s, "inputs", where);
    step.outputs = string_list(s, "outputs", where);
    if (auto params = s.find("params"); params != s.end()) {
      if (!params->is_object())
        malformed(where + ": 'params' must be an object");
      step.params = *params;
    }
    p.steps.push_back(std::move(step));
  }
  return p;
}

nlohmann::json to_json(const Pipeline& pipeline) {
  nlohmann::json j;
  j["name"] = pipeline.name;
  if (!pipeline.file_bindings.empty())
    j["bindings"] = pipeline.file_bindings;
  j["steps"] = nlohmann::json::array();
  for (const auto& s : pipeline.steps)
    j["steps"].push_back(
      {{"action", s.action}, {"inputs", s.inputs}, {"params", s.params}, {"outputs", s.outputs}});
  return j;
}

nlohmann::json to_json(const RunReport& report) {
  nlohmann::json j;
  j["pipeline"] = report.pipeline;
  j["total_duration_ms"] = report.total_duration_ms;
  j["steps"] = nlohmann::json::array();
  for (const auto& s : report.steps) {
    nlohmann::json step{{"action", s.action},
                        {"status", std::string(to_string(s.status))},
                        {"duration_ms", s.duration_ms}};
    step["produced"] = nlohmann::json::array();
    for (auto id : s.produced)
      step["produced"].push_back(std::to_string(id));
    if (!s.error.empty())
      step["error"] = s.error;
    j["steps"].push_back(std::move(step));
  }
  return j;
}

} // namespace camikit
