#pragma once

#include "gnormal/error.hpp"

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

namespace gnormal::detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

// Accepts plain decimals plus the symbolic constants "pi" and "-pi".
inline double parse_double(std::string_view s) {
    s = trim(s);
    if (s == "pi")
        return 3.14159265358979323846;
    if (s == "-pi")
        return -3.14159265358979323846;
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        fail(ErrorKind::usage, "not a number: '" + std::string(s) + "'");
    return v;
}

}  // namespace gnormal::detail
