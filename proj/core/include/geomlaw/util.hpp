#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace geomlaw {

// Raised for malformed configuration or invalid arguments.  The CLI maps this
// to exit code 2; every other exception maps to exit code 3.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Locale-independent shortest round-trip formatting. Infinities print as
// "inf"/"-inf" so CSV rows stay parseable.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw ConfigError("invalid numeric field '" + std::string(text) + "'");
    return v;
}

// Mean / sample standard error of a replicate vector.
struct Summary {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t count = 0;
};

inline Summary summarize(std::span<const double> values) {
    Summary s;
    s.count = values.size();
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            double d = v - s.mean;
            ss += d * d;
        }
        double var = ss / static_cast<double>(values.size() - 1);
        s.stderr_ = std::sqrt(var / static_cast<double>(values.size()));
    }
    return s;
}

// Two-sided 95% normal quantile, used for confidence intervals.
inline constexpr double kZ95 = 1.959963984540054;

// Volume of the unit d-ball.
inline double unit_ball_volume(int dim) {
    return std::pow(3.14159265358979323846, dim / 2.0) /
           std::tgamma(dim / 2.0 + 1.0);
}

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace geomlaw
