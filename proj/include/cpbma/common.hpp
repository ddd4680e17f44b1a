#pragma once

#include <charconv>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace cpbma {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Invalid parameter, range, or option combination. CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Vector/matrix shapes do not agree.
struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Degenerate numerics: failed Cholesky, all-(-inf) weights, and the like.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File or stream failure. CLI maps this to exit code 2.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require_dim(bool ok, const char* what) {
    if (!ok) throw DimensionError(what);
}

/// Shortest decimal string that round-trips back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Exact inverse of format_double.
inline double parse_double(std::string_view s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw IoError("cannot parse floating-point value: '" + std::string(s) + "'");
    return v;
}

inline long parse_long(std::string_view s) {
    long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw IoError("cannot parse integer value: '" + std::string(s) + "'");
    return v;
}

}  // namespace cpbma
