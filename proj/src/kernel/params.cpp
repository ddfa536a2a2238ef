#include "camikit/kernel/params.hpp"

#include "camikit/error.hpp"
#include "camikit/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace camikit {

std::string_view to_string(ParamType type) noexcept {
  switch (type) {
  case ParamType::integer: return "int";
  case ParamType::real: return "real";
  case ParamType::boolean: return "bool";
  case ParamType::string: return "string";
  case ParamType::enumeration: return "enum";
  case ParamType::real3: return "real3";
  }
  return "?";
}

namespace {

[[noreturn]] void invalid(const std::string& name, const std::string& reason) {
  throw Error(ErrorCode::ParamValidation, name + ": " + reason);
}

void check_range(const ParamSpec& spec, double v) {
  if (!std::isfinite(v))
    invalid(spec.name, "value must be finite");
  if (spec.min && v < *spec.min)
    invalid(spec.name, text::format_double(v) + " is below the minimum " +
                         text::format_double(*spec.min));
  if (spec.max && v > *spec.max)
    invalid(spec.name, text::format_double(v) + " is above the maximum " +
                         text::format_double(*spec.max));
}

// Returns the value coerced to the entry's canonical alternative.
ParamValue coerce(const ParamSpec& spec, const ParamValue& value) {
  switch (spec.type) {
  case ParamType::integer:
    if (const auto* i = std::get_if<std::int64_t>(&value)) {
      check_range(spec, static_cast<double>(*i));
      return *i;
    }
    invalid(spec.name, "expected an integer");
  case ParamType::real:
    if (const auto* d = std::get_if<double>(&value)) {
      check_range(spec, *d);
      return *d;
    }
    if (const auto* i = std::get_if<std::int64_t>(&value)) {
      check_range(spec, static_cast<double>(*i));
      return static_cast<double>(*i);
    }
    invalid(spec.name, "expected a real number");
  case ParamType::boolean:
    if (const auto* b = std::get_if<bool>(&value))
      return *b;
    invalid(spec.name, "expected a boolean");
  case ParamType::string:
    if (const auto* s = std::get_if<std::string>(&value))
      return *s;
    invalid(spec.name, "expected a string");
  case ParamType::enumeration:
    if (const auto* s = std::get_if<std::string>(&value)) {
      if (std::find(spec.choices.begin(), spec.choices.end(), *s) == spec.choices.end())
        invalid(spec.name, "'" + *s + "' is not one of the allowed choices");
      return *s;
    }
    invalid(spec.name, "expected one of the enumeration choices");
  case ParamType::real3:
    if (const auto* v = std::get_if<Vec3>(&value)) {
      for (std::size_t a = 0; a < 3; ++a)
        check_range(spec, (*v)[a]);
      return *v;
    }
    invalid(spec.name, "expected three real numbers");
  }
  invalid(spec.name, "unsupported type");
}

} // namespace

void check_schema(const ParameterSchema& schema) {
  std::set<std::string> names;
  for (const auto& spec : schema) {
    if (spec.name.empty())
      throw Error(ErrorCode::InvalidArgument, "parameter with empty name");
    if (!names.insert(spec.name).second)
      throw Error(ErrorCode::InvalidArgument, "duplicate parameter '" + spec.name + "'");
    if (spec.type == ParamType::enumeration && spec.choices.empty())
      throw Error(ErrorCode::InvalidArgument, "enumeration '" + spec.name + "' has no choices");
    if (spec.min && spec.max && *spec.min > *spec.max)
      throw Error(ErrorCode::InvalidArgument, "parameter '" + spec.name + "' has min > max");
    if (spec.default_value) {
      try {
        coerce(spec, *spec.default_value);
      } catch (const Error& e) {
        throw Error(ErrorCode::InvalidArgument, "invalid default for " + e.detail());
      }
    }
  }
}

ParamSet validate_params(const ParameterSchema& schema, const ParamSet& given) {
  for (const auto& [name, value] : given) {
    const bool known = std::any_of(schema.begin(), schema.end(),
                                   [&](const ParamSpec& s) { return s.name == name; });
    if (!known)
      invalid(name, "unknown parameter");
  }
  ParamSet out;
  for (const auto& spec : schema) {
    auto it = given.find(spec.name);
    if (it != given.end()) {
      out.emplace(spec.name, coerce(spec, it->second));
    } else if (spec.default_value) {
      out.emplace(spec.name, coerce(spec, *spec.default_value));
    } else if (spec.required) {
      invalid(spec.name, "required parameter is missing");
    }
  }
  return out;
}

ParamValue parse_param_text(const ParamSpec& spec, std::string_view raw) {
  const auto s = text::trim(raw);
  switch (spec.type) {
  case ParamType::integer:
    if (auto v = text::parse_int(s))
      return static_cast<std::int64_t>(*v);
    invalid(spec.name, "'" + std::string(s) + "' is not an integer");
  case ParamType::real:
    if (auto v = text::parse_double(s))
      return *v;
    invalid(spec.name, "'" + std::string(s) + "' is not a number");
  case ParamType::boolean: {
    const auto l = text::to_lower(s);
    if (l == "true" || l == "1" || l == "yes")
      return true;
    if (l == "false" || l == "0" || l == "no")
      return false;
    invalid(spec.name, "'" + std::string(s) + "' is not a boolean");
  }
  case ParamType::string:
  case ParamType::enumeration:
    return std::string(s);
  case ParamType::real3: {
    auto parts = text::split(s, ',');
    if (parts.size() != 3)
      invalid(spec.name, "expected 'x,y,z'");
    Vec3 v;
    for (std::size_t a = 0; a < 3; ++a) {
      auto d = text::parse_double(text::trim(parts[a]));
      if (!d)
        invalid(spec.name, "expected 'x,y,z'");
      v[a] = *d;
    }
    return v;
  }
  }
  invalid(spec.name, "unsupported type");
}

nlohmann::json to_json(const ParamValue& value) {
  return std::visit(
    [](const auto& v) -> nlohmann::json {
      using T = std::decay_t<decltype(v)>;
      if constexpr (std::is_same_v<T, Vec3>)
        return nlohmann::json::array({v.x, v.y, v.z});
      else
        return v;
    },
    value);
}

nlohmann::json to_json(const ParamSet& params) {
  auto obj = nlohmann::json::object();
  for (const auto& [name, value] : params)
    obj[name] = to_json(value);
  return obj;
}

nlohmann::json to_json(const ParamSpec& spec) {
  nlohmann::json j{{"name", spec.name},
                   {"type", std::string(to_string(spec.type))},
                   {"required", spec.required},
                   {"description", spec.description}};
  j["default"] = spec.default_value ? to_json(*spec.default_value) : nlohmann::json();
  j["min"] = spec.min ? nlohmann::json(*spec.min) : nlohmann::json();
  j["max"] = spec.max ? nlohmann::json(*spec.max) : nlohmann::json();
  if (spec.type == ParamType::enumeration)
    j["choices"] = spec.choices;
  return j;
}

ParamValue param_from_json(const ParamSpec& spec, const nlohmann::json& value) {
  switch (spec.type) {
  case ParamType::integer:
    if (value.is_number_integer())
      return value.get<std::int64_t>();
    if (value.is_number_float()) {
      const double d = value.get<double>();
      if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9.0e15)
        return static_cast<std::int64_t>(d);
    }
    invalid(spec.name, "expected an integer");
  case ParamType::real:
    if (value.is_number())
      return value.get<double>();
    invalid(spec.name, "expected a number");
  case ParamType::boolean:
    if (value.is_boolean())
      return value.get<bool>();
    invalid(spec.name, "expected a boolean");
  case ParamType::string:
  case ParamType::enumeration:
    if (value.is_string())
      return value.get<std::string>();
    invalid(spec.name, "expected a string");
  case ParamType::real3:
    if (value.is_array() && value.size() == 3 &&
        std::all_of(value.begin(), value.end(), [](const auto& e) { return e.is_number(); }))
      return Vec3{value[0].get<double>(), value[1].get<double>(), value[2].get<double>()};
    invalid(spec.name, "expected an array of three numbers");
  }
  invalid(spec.name, "unsupported type");
}

ParamSet params_from_json(const ParameterSchema& schema, const nlohmann::json& object) {
  if (object.is_null())
    return {};
  if (!object.is_object())
    throw Error(ErrorCode::ParamValidation, "params must be a JSON object");
  ParamSet out;
  for (const auto& [name, value] : object.items()) {
    auto it = std::find_if(schema.begin(), schema.end(),
                           [&](const ParamSpec& s) { return s.name == name; });
    if (it == schema.end())
      invalid(name, "unknown parameter");
    out.emplace(name, param_from_json(*it, value));
  }
  return out;
}

std::string format_param(const ParamValue& value) {
  return std::visit(
    [](const auto& v) -> std::string {
      using T = std::decay_t<decltype(v)>;
      if constexpr (std::is_same_v<T, Vec3>)
        return text::format_double(v.x) + "," + text::format_double(v.y) + "," +
               text::format_double(v.z);
      else if constexpr (std::is_same_v<T, bool>)
        return v ? "true" : "false";
      else if constexpr (std::is_same_v<T, double>)
        return text::format_double(v);
      else if constexpr (std::is_same_v<T, std::string>)
        return v;
      else
        return std::to_string(v);
    },
    value);
}

namespace {

template <typename T>
const T& get_typed(const ParamSet& params, const std::string& name) {
  auto it = params.find(name);
  if (it == params.end())
    invalid(name, "parameter not set");
  const auto* v = std::get_if<T>(&it->second);
  if (!v)
    invalid(name, "parameter has an unexpected type");
  return *v;
}

} // namespace

std::int64_t get_int(const ParamSet& params, const std::string& name) {
  return get_typed<std::int64_t>(params, name);
}

double get_real(const ParamSet& params, const std::string& name) {
  auto it = params.find(name);
  if (it != params.end())
    if (const auto* i = std::get_if<std::int64_t>(&it->second))
      return static_cast<double>(*i);
  return get_typed<double>(params, name);
}

bool get_bool(const ParamSet& params, const std::string& name) {
  return get_typed<bool>(params, name);
}

const std::string& get_string(const ParamSet& params, const std::string& name) {
  return get_typed<std::string>(params, name);
}

Vec3 get_vec3(const ParamSet& params, const std::string& name) {
  return get_typed<Vec3>(params, name);
}

bool has_param(const ParamSet& params, const std::string& name) noexcept {
  return params.count(name) != 0;
}

} // namespace camikit
