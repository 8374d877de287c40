#ifndef MORANFRAC_COMMON_HPP
#define MORANFRAC_COMMON_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace moranfrac {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

/// Raised for malformed or schema-violating input documents.
class ConfigError : public std::runtime_error {
public:
    enum class Kind { parse, schema };
    ConfigError(Kind kind, std::string msg) : std::runtime_error(std::move(msg)), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Raised when an argument is outside an operation's domain.
class DomainError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when an enumeration or raster would exceed its configured cap.
class SizeError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double pairwise_sum_impl(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t h = xs.size() / 2;
    return pairwise_sum_impl(xs.first(h)) + pairwise_sum_impl(xs.subspan(h));
}

/// Deterministic pairwise reduction; order-stable and ~log(n) rounding error.
inline double pairwise_sum(std::span<const double> xs) { return pairwise_sum_impl(xs); }
inline double pairwise_sum(const std::vector<double>& xs) {
    return pairwise_sum_impl(std::span<const double>(xs));
}

/// log(sum(exp(x))) without overflow; -inf for an empty list.
inline double log_sum_exp(std::span<const double> xs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : xs) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

/// Exact comparison helpers for a positive double against 1/B with BigInt B.
/// The double is decomposed as mant * 2^e2, so the test is free of rounding.
inline bool one_over_le(const BigInt& b, double delta) {
    // 1/b <= delta  <=>  delta_num * b >= delta_den
    int e2 = 0;
    const double f = std::frexp(delta, &e2);                 // delta = f * 2^e2, f in [0.5, 1)
    const auto mant = static_cast<std::int64_t>(std::ldexp(f, 53));
    BigInt num = mant;
    BigInt den = 1;
    const int shift = e2 - 53;
    if (shift >= 0)
        num <<= shift;
    else
        den <<= -shift;
    return num * b >= den;
}

}  // namespace moranfrac

#endif
