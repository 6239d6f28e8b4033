#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace naryq::detail {

// Shortest decimal string that round-trips the double. Used everywhere a
// report or CSV must be byte-identical across runs.
inline std::string format_shortest(double v) {
    if (v == 0.0) return "0";  // fold away -0
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace naryq::detail
