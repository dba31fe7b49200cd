#pragma once

#include <string>
#include <string_view>

namespace mbgp {

/// Decimal text with 17 significant digits; parses back to the same double.
std::string format_double(double x);

/// Strict parse of a whole token. Throws IoError naming `what` on failure.
double parse_double(std::string_view text, std::string_view what);
long long parse_integer(std::string_view text, std::string_view what);

} // namespace mbgp
