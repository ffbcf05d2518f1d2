#pragma once

#include <string>

namespace searcheq {

/// Round-trippable decimal: 17 significant digits, '.' separator, no locale,
/// "nan" / "inf" / "-inf" for non-finite values.
std::string format_double(double x);

} // namespace searcheq
