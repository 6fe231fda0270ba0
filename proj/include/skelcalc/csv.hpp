#pragma once

#include <cstdio>
#include <ostream>
#include <string>

namespace skelcalc {

/// Round-trip decimal form (17 significant digits).
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace skelcalc
