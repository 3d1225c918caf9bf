#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace elmsol {

// Shortest decimal text that parses back to the identical double.
std::string format_exact(double value);

// Strict full-string parse; leading/trailing blanks are ignored. Accepts
// "nan", "inf" and "-inf". Returns nullopt on any other malformed input.
std::optional<double> parse_double(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace elmsol
