#pragma once

// Small builders for parameter schemas and action outputs.

#include "camikit/kernel/action.hpp"

#include <nlohmann/json.hpp>

#include <limits>
#include <optional>
#include <string>

namespace camikit::extensions {

inline ParamSpec real(std::string name, std::optional<double> def, std::string description,
                      std::optional<double> min = {}, std::optional<double> max = {}) {
  ParamSpec s;
  s.name = std::move(name);
  s.type = ParamType::real;
  if (def)
    s.default_value = *def;
  s.required = !def;
  s.min = min;
  s.max = max;
  s.description = std::move(description);
  return s;
}

inline ParamSpec integer(std::string name, std::optional<std::int64_t> def,
                         std::string description, std::optional<double> min = {},
                         std::optional<double> max = {}) {
  ParamSpec s;
  s.name = std::move(name);
  s.type = ParamType::integer;
  if (def)
    s.default_value = *def;
  s.required = !def;
  s.min = min;
  s.max = max;
  s.description = std::move(description);
  return s;
}

inline ParamSpec real3(std::string name, Vec3 def, std::string description) {
  ParamSpec s;
  s.name = std::move(name);
  s.type = ParamType::real3;
  s.default_value = def;
  s.description = std::move(description);
  return s;
}

inline ParamSpec choice(std::string name, std::vector<std::string> choices,
                        std::string description) {
  ParamSpec s;
  s.name = std::move(name);
  s.type = ParamType::enumeration;
  s.default_value = choices.front();
  s.choices = std::move(choices);
  s.description = std::move(description);
  return s;
}

/// Optional override: neither required nor defaulted.
inline ParamSpec optional_real(std::string name, std::string description,
                               std::optional<double> min = {}, std::optional<double> max = {}) {
  auto s = real(std::move(name), std::nullopt, std::move(description), min, max);
  s.required = false;
  return s;
}

inline ActionOutput json_output(std::string label, const nlohmann::json& j) {
  return ActionOutput{std::move(label), GenericData{"application/json", j.dump(2) + "\n", ""}};
}

template <class T>
const T& input_as(const ActionInput& in) {
  return std::get<T>(*in.payload);
}

} // namespace camikit::extensions
