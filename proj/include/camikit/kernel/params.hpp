#pragma once

#include "camikit/geometry.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace camikit {

enum class ParamType { integer, real, boolean, string, enumeration, real3 };

std::string_view to_string(ParamType type) noexcept;

/// Enumeration values are carried as strings.
using ParamValue = std::variant<std::int64_t, double, bool, std::string, Vec3>;

/// One entry of an action's parameter schema.
struct ParamSpec {
  std::string name;
  ParamType type = ParamType::real;
  std::optional<ParamValue> default_value;
  std::optional<double> min;
  std::optional<double> max;
  bool required = false;
  std::vector<std::string> choices; // enumeration only
  std::string description;
};

using ParameterSchema = std::vector<ParamSpec>;

/// Validated parameters, keyed by name.
using ParamSet = std::map<std::string, ParamValue>;

/// Throws InvalidArgument if a default does not type- or range-match its
/// entry, names repeat, or an enumeration has no choices.
void check_schema(const ParameterSchema& schema);

/// Type- and range-checks `given` against `schema`, fills omitted entries
/// from defaults, and rejects unknown names. Integers are accepted for real
/// entries. Throws ParamValidation naming the offending entry.
ParamSet validate_params(const ParameterSchema& schema, const ParamSet& given);

/// Parses `k=v` style text for one schema entry (real3 as "x,y,z").
ParamValue parse_param_text(const ParamSpec& spec, std::string_view text);

nlohmann::json to_json(const ParamValue& value);
nlohmann::json to_json(const ParamSet& params);
nlohmann::json to_json(const ParamSpec& spec);

/// Converts a JSON value to a ParamValue guided by the schema entry type.
/// Throws ParamValidation on a type mismatch.
ParamValue param_from_json(const ParamSpec& spec, const nlohmann::json& value);

/// Converts a JSON object to a ParamSet using `schema` for typing; names
/// absent from the schema are rejected.
ParamSet params_from_json(const ParameterSchema& schema, const nlohmann::json& object);

std::string format_param(const ParamValue& value);

std::int64_t get_int(const ParamSet& params, const std::string& name);
double get_real(const ParamSet& params, const std::string& name);
bool get_bool(const ParamSet& params, const std::string& name);
const std::string& get_string(const ParamSet& params, const std::string& name);
Vec3 get_vec3(const ParamSet& params, const std::string& name);
bool has_param(const ParamSet& params, const std::string& name) noexcept;

} // namespace camikit
