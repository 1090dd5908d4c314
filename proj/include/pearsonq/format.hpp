#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <system_error>

namespace pearsonq {

/// Shortest decimal string that round-trips to the same double. Keeps CSV and
/// JSON output byte-stable across runs and thread counts.
[[nodiscard]] inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc{}) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    }
    return std::string(buf, res.ptr);
}

}  // namespace pearsonq
