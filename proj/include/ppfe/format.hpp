#pragma once

#include <string>

namespace ppfe {

/// Round-trip decimal form (17 significant digits); "inf", "-inf" and "nan" otherwise.
std::string format_double(double v);

}  // namespace ppfe
