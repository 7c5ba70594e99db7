#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace aisim {

/// Shortest decimal text that parses back to the same double. Stable across
/// runs, which the byte-identical CSV outputs rely on.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace aisim
