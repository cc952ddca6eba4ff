#pragma once

#include "sectobs/factor.hpp"
#include "sectobs/integers.hpp"

#include <set>
#include <string>

namespace sectobs {

/// An element a + b*sqrt(d) of Q(sqrt(d)), d squarefree. The degenerate tag
/// d = 1 stands for Q itself (b is forced to 0 there); it appears as the
/// component field attached to linear factors.
struct QuadElement {
    Rational a;
    Rational b;
    Integer d = 1;

    QuadElement() = default;
    QuadElement(Rational a_, Rational b_, Integer d_) : a(std::move(a_)), b(std::move(b_)), d(std::move(d_)) {
        if (d == 0) throw std::domain_error("QuadElement: d must be nonzero");
        if (d == 1 && b != 0) throw std::domain_error("QuadElement: rational field tag requires b = 0");
    }
    static QuadElement rational(Rational a_, Integer d_ = 1) { return QuadElement(std::move(a_), 0, std::move(d_)); }

    bool is_zero() const { return a == 0 && b == 0; }
    bool is_rational() const { return b == 0; }

    std::string str() const {
        if (b == 0) return to_string(a);
        return to_string(a) + " + (" + to_string(b) + ")*sqrt(" + d.str() + ")";
    }
};

inline void check_same_field(const QuadElement& x, const QuadElement& y) {
    if (x.d != y.d) throw std::domain_error("quadratic field mismatch");
}

inline QuadElement quad_add(const QuadElement& x, const QuadElement& y) {
    check_same_field(x, y);
    return {x.a + y.a, x.b + y.b, x.d};
}

inline QuadElement quad_sub(const QuadElement& x, const QuadElement& y) {
    check_same_field(x, y);
    return {x.a - y.a, x.b - y.b, x.d};
}

inline QuadElement quad_mul(const QuadElement& x, const QuadElement& y) {
    check_same_field(x, y);
    return {x.a * y.a + Rational(x.d) * x.b * y.b, x.a * y.b + x.b * y.a, x.d};
}

inline QuadElement quad_scale(const Rational& c, const QuadElement& x) {
    return {c * x.a, c * x.b, x.d};
}

inline QuadElement quad_conj(const QuadElement& x) { return {x.a, -x.b, x.d}; }

inline Rational quad_norm(const QuadElement& x) { return x.a * x.a - Rational(x.d) * x.b * x.b; }

inline Rational quad_trace(const QuadElement& x) { return 2 * x.a; }

inline QuadElement quad_inv(const QuadElement& x) {
    Rational n = quad_norm(x);
    if (n == 0) throw std::domain_error("quad_inv: zero or zero-norm element");
    return {x.a / n, -x.b / n, x.d};
}

inline QuadElement quad_div(const QuadElement& x, const QuadElement& y) {
    return quad_mul(x, quad_inv(y));
}

inline bool quad_equal(const QuadElement& x, const QuadElement& y) {
    return x.d == y.d && x.a == y.a && x.b == y.b;
}

/// Exact squareness in Q(sqrt(d)). e = a + b*sqrt(d) is a square iff its
/// norm is a square n^2 in Q and one of (a+n)/2, (a-n)/2 is a nonzero
/// rational square u^2 (then v = b/2u); for b = 0 the criterion degenerates
/// to a or a/d being a rational square.
inline bool quad_is_square(const QuadElement& e) {
    if (e.is_zero()) throw std::domain_error("quad_is_square: zero element");
    if (e.d == 1) return is_square(e.a);
    if (e.b == 0) return is_square(e.a) || is_square(e.a / Rational(e.d));
    auto n = sqrt_exact(quad_norm(e));
    if (!n) return false;
    for (const Rational& root : {*n, Rational(-*n)}) {
        Rational u2 = (e.a + root) / 2;
        if (u2 != 0 && is_square(u2)) return true;
    }
    return false;
}

/// Primes dividing 2, d, the norm (numerator or denominator) or the
/// coordinate denominators. Any rational w with w*e a square in Q(sqrt(d))
/// has its squarefree support inside this set: at an unramified prime of w
/// both valuations of e must be odd, which forces the prime into the norm
/// unless one valuation is negative, and then into a coordinate
/// denominator.
inline std::set<Integer> square_class_support(const QuadElement& e) {
    if (e.is_zero()) throw std::domain_error("square_class_support: zero element");
    std::set<Integer> s{2};
    for (const auto& part : {prime_support(e.d), prime_support(quad_norm(e)),
                             prime_support(den(e.a)), prime_support(den(e.b))})
        s.insert(part.begin(), part.end());
    return s;
}

/// A class in L*/(L*)^2 carried by an explicit representative.
struct SquareClass {
    Integer d = 1;
    QuadElement rep;
    std::set<Integer> support;

    SquareClass() = default;
    explicit SquareClass(QuadElement r) : d(r.d), rep(std::move(r)) {
        if (rep.is_zero()) throw std::domain_error("SquareClass: zero representative");
        support = square_class_support(rep);
    }
};

inline bool square_class_trivial(const SquareClass& c) { return quad_is_square(c.rep); }

inline SquareClass square_class_mul(const SquareClass& x, const SquareClass& y) {
    return SquareClass(quad_mul(x.rep, y.rep));
}

inline bool square_class_equal(const SquareClass& x, const SquareClass& y) {
    return quad_is_square(quad_div(x.rep, y.rep));
}

}  // namespace sectobs
