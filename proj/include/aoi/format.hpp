#pragma once

#include <charconv>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

namespace aoi {

// Shortest decimal that round-trips the exact double (so emitted CSV parses
// back bit-identical). NaN prints as "nan".
inline std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        if (s == "nan" || s == "-nan") {
            return std::numeric_limits<double>::quiet_NaN();
        }
        return std::nullopt;
    }
    return v;
}

}  // namespace aoi
