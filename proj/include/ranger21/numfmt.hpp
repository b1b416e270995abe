#pragma once

#include <string>
#include <string_view>

namespace ranger21 {

/// Decimal text with 17 significant digits (%.17g style), which round-trips
/// every finite double exactly and is identical across platforms.
std::string format_double(double x);

/// Parses the whole of `text` as a double; throws std::invalid_argument on
/// trailing garbage or an empty field.
double parse_double(std::string_view text);

}  // namespace ranger21
