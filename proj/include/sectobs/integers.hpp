#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace sectobs {

using Integer =
    boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>, boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<
    boost::multiprecision::backends::rational_adaptor<boost::multiprecision::cpp_int_backend<>>,
    boost::multiprecision::et_off>;

// Raised when an internal completeness bound is exceeded. Callers map this
// to a distinct exit code; it always indicates a defect, not bad input.
struct internal_defect : std::logic_error {
    using std::logic_error::logic_error;
};

struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Integer num(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer den(const Rational& q) { return boost::multiprecision::denominator(q); }

inline Integer abs_int(const Integer& n) { return n < 0 ? Integer(-n) : n; }

inline Integer gcd_int(Integer a, Integer b) {
    return boost::multiprecision::gcd(a, b);
}

inline Integer isqrt(const Integer& n) {
    if (n < 0) throw std::domain_error("isqrt of negative integer");
    return boost::multiprecision::sqrt(n);
}

inline bool is_square(const Integer& n) {
    if (n < 0) return false;
    Integer r = isqrt(n);
    return r * r == n;
}

/// Exact square root when n is a perfect square.
inline std::optional<Integer> sqrt_exact(const Integer& n) {
    if (n < 0) return std::nullopt;
    Integer r = isqrt(n);
    if (r * r == n) return r;
    return std::nullopt;
}

inline bool is_square(const Rational& q) {
    return q >= 0 && is_square(num(q)) && is_square(den(q));
}

inline std::optional<Rational> sqrt_exact(const Rational& q) {
    if (q < 0) return std::nullopt;
    auto n = sqrt_exact(num(q));
    auto d = sqrt_exact(den(q));
    if (!n || !d) return std::nullopt;
    return Rational(*n, *d);
}

inline Integer pow_int(Integer base, unsigned exp) {
    Integer r = 1;
    while (exp) {
        if (exp & 1) r *= base;
        base *= base;
        exp >>= 1;
    }
    return r;
}

inline Integer mod_pow(Integer base, Integer exp, const Integer& mod) {
    Integer r = 1;
    base %= mod;
    if (base < 0) base += mod;
    while (exp > 0) {
        if ((exp & 1) != 0) r = r * base % mod;
        base = base * base % mod;
        exp >>= 1;
    }
    return r;
}

inline std::string to_string(const Integer& n) { return n.str(); }

/// Renders "n" or "n/d", the exact-fraction format used in certificates.
inline std::string to_string(const Rational& q) {
    if (den(q) == 1) return num(q).str();
    return num(q).str() + "/" + den(q).str();
}

inline Rational parse_rational(const std::string& s) {
    try {
        auto slash = s.find('/');
        if (slash == std::string::npos) return Rational(Integer(s));
        Integer n(s.substr(0, slash));
        Integer d(s.substr(slash + 1));
        if (d == 0) throw input_error("zero denominator in '" + s + "'");
        return Rational(n, d);
    } catch (const input_error&) {
        throw;
    } catch (const std::exception&) {
        throw input_error("cannot parse rational '" + s + "'");
    }
}

}  // namespace sectobs
