#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace camikit::text {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

std::optional<double> parse_double(std::string_view token) noexcept;
std::optional<long long> parse_int(std::string_view token) noexcept;

std::string_view trim(std::string_view s) noexcept;

/// Splits on runs of ASCII whitespace.
std::vector<std::string_view> split_ws(std::string_view s);

/// Splits on a single delimiter character, keeping empty fields.
std::vector<std::string_view> split(std::string_view s, char delim);

std::string to_lower(std::string_view s);

bool ends_with_ci(std::string_view s, std::string_view suffix) noexcept;

} // namespace camikit::text
