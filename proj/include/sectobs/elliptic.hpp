#pragma once

#include "sectobs/curve.hpp"
#include "sectobs/divisor.hpp"
#include "sectobs/polynomial.hpp"

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

namespace sectobs {

/// Y^2 = c3 u^3 + c2 u^2 + c1 u + c0.
struct RawCubic {
    std::array<Rational, 4> c{};  // c[i] multiplies u^i

    Poly poly() const { return Poly(std::vector<Rational>(c.begin(), c.end())); }
    Rational eval(const Rational& u) const { return poly().eval(u); }
};

struct EllipticPoint {
    bool infinity = true;
    Rational x;
    Rational y;

    static EllipticPoint at_infinity() { return {}; }
    static EllipticPoint affine(Rational x_, Rational y_) {
        return {false, std::move(x_), std::move(y_)};
    }
    friend bool operator==(const EllipticPoint& a, const EllipticPoint& b) {
        if (a.infinity || b.infinity) return a.infinity == b.infinity;
        return a.x == b.x && a.y == b.y;
    }
};

/// Integral split model Y^2 = (X-e1)(X-e2)(X-e3) with the transformation
/// back to the raw quotient cubic: X = kx * u, Y = ky * y.
struct EllipticCurve {
    std::array<Integer, 3> e{};
    Rational kx = 1;
    Rational ky = 1;

    Rational a2() const { return Rational(-(e[0] + e[1] + e[2])); }
    Rational a4() const { return Rational(e[0] * e[1] + e[0] * e[2] + e[1] * e[2]); }
    Rational a6() const { return Rational(-e[0] * e[1] * e[2]); }

    Rational rhs(const Rational& x) const {
        return (x - Rational(e[0])) * (x - Rational(e[1])) * (x - Rational(e[2]));
    }
    bool on_curve(const EllipticPoint& p) const {
        return p.infinity || p.y * p.y == rhs(p.x);
    }

    EllipticPoint to_integral(const EllipticPoint& raw) const {
        if (raw.infinity) return raw;
        return EllipticPoint::affine(kx * raw.x, ky * raw.y);
    }
    EllipticPoint to_raw(const EllipticPoint& integral) const {
        if (integral.infinity) return integral;
        return EllipticPoint::affine(integral.x / kx, integral.y / ky);
    }
};

/// The two quotient cubics of an even sextic: g with g(x^2) = F(x), and its
/// reversal for the chart (x, y) -> (1/x^2, y/x^3).
inline std::pair<RawCubic, RawCubic> bielliptic_quotients(const Genus2Curve& c) {
    if (c.f[1] != 0 || c.f[3] != 0 || c.f[5] != 0)
        throw input_error("bielliptic quotients need an even sextic");
    RawCubic e1{{c.f[0], c.f[2], c.f[4], c.f[6]}};
    RawCubic e2{{c.f[6], c.f[4], c.f[2], c.f[0]}};
    return {e1, e2};
}

/// Integral split form of a cubic with rational roots, recording the scaling.
inline EllipticCurve integralize(const RawCubic& raw) {
    Poly p = raw.poly();
    if (p.degree() != 3) throw input_error("integralize: cubic required");
    std::vector<Rational> roots = detail::rational_roots(p);
    if (roots.size() != 3)
        throw input_error("integralize: full rational 2-torsion required");
    std::sort(roots.begin(), roots.end());
    const Rational& lead = raw.c[3];
    Integer lambda = 1;
    for (const Rational& r : roots) {
        Integer d = den(lead * r);
        lambda = lambda / gcd_int(lambda, d) * d;
    }
    EllipticCurve out;
    out.kx = lead * Rational(lambda) * Rational(lambda);
    out.ky = lead * Rational(lambda) * Rational(lambda) * Rational(lambda);
    for (size_t i = 0; i < 3; ++i) {
        Rational ei = out.kx * roots[i];
        if (den(ei) != 1) throw internal_defect("integralize: scaling failed to clear roots");
        out.e[i] = num(ei);
    }
    if (out.e[0] == out.e[1] || out.e[1] == out.e[2] || out.e[0] == out.e[2])
        throw input_error("integralize: repeated roots");
    return out;
}

inline EllipticPoint negate(const EllipticPoint& p) {
    if (p.infinity) return p;
    return EllipticPoint::affine(p.x, -p.y);
}

inline EllipticPoint add(const EllipticCurve& E, const EllipticPoint& p, const EllipticPoint& q) {
    if (p.infinity) return q;
    if (q.infinity) return p;
    Rational lambda;
    if (p.x == q.x) {
        if (p.y != q.y || p.y == 0) return EllipticPoint::at_infinity();
        lambda = (3 * p.x * p.x + 2 * E.a2() * p.x + E.a4()) / (2 * p.y);
    } else {
        lambda = (q.y - p.y) / (q.x - p.x);
    }
    Rational x3 = lambda * lambda - E.a2() - p.x - q.x;
    Rational y3 = lambda * (p.x - x3) - p.y;
    return EllipticPoint::affine(x3, y3);
}

inline EllipticPoint multiply(const EllipticCurve& E, EllipticPoint p, Integer n) {
    if (n < 0) {
        p = negate(p);
        n = -n;
    }
    EllipticPoint acc = EllipticPoint::at_infinity();
    while (n > 0) {
        if ((n & 1) != 0) acc = add(E, acc, p);
        p = add(E, p, p);
        n >>= 1;
    }
    return acc;
}

/// Order if p is torsion (Mazur: rational torsion order is at most 12).
inline std::optional<int> torsion_order(const EllipticCurve& E, const EllipticPoint& p) {
    EllipticPoint acc = EllipticPoint::at_infinity();
    for (int k = 1; k <= 12; ++k) {
        acc = add(E, acc, p);
        if (acc.infinity) return k;
    }
    return std::nullopt;
}

/// A rational Q with 2Q = p, if one exists: rational roots of the halving
/// quartic, each validated through the group law.
inline std::optional<EllipticPoint> halve_point(const EllipticCurve& E, const EllipticPoint& p) {
    if (p.infinity) return EllipticPoint::at_infinity();
    Poly f({E.a6(), E.a4(), E.a2(), 1});
    Poly tangent_num = Poly({E.a4(), 2 * E.a2(), 3}) * Poly({E.a4(), 2 * E.a2(), 3});
    Poly quartic = tangent_num - Poly({E.a2() + p.x, 2}) * Poly::constant(4) * f;
    for (const Rational& x : detail::rational_roots(quartic)) {
        Rational y2 = f.eval(x);
        auto y = sqrt_exact(y2);
        if (!y) continue;
        for (const Rational& yy : {*y, -*y}) {
            EllipticPoint q = EllipticPoint::affine(x, yy);
            if (add(E, q, q) == p) return q;
            if (yy == 0) break;
        }
    }
    return std::nullopt;
}

inline std::vector<EllipticPoint> two_torsion_points(const EllipticCurve& E) {
    return {EllipticPoint::affine(Rational(E.e[0]), 0), EllipticPoint::affine(Rational(E.e[1]), 0),
            EllipticPoint::affine(Rational(E.e[2]), 0)};
}

/// Divides out 2 (modulo 2-torsion) until the point is not halvable. Keeps
/// descent images of search results primitive.
inline EllipticPoint saturate_at_two(const EllipticCurve& E, EllipticPoint p) {
    for (;;) {
        bool reduced = false;
        std::vector<EllipticPoint> shifts = two_torsion_points(E);
        shifts.push_back(EllipticPoint::at_infinity());
        for (const auto& t : shifts) {
            if (auto q = halve_point(E, add(E, p, t))) {
                if (!q->infinity && torsion_order(E, *q) == std::nullopt) {
                    p = *q;
                    reduced = true;
                    break;
                }
            }
        }
        if (!reduced) return p;
    }
}

/// Pullback of a raw-model quotient point to a divisor class on C. Chart 1
/// inverts (x, y) -> (x^2, y); chart 2 inverts (x, y) -> (1/x^2, y/x^3).
inline DivisorClass pullback(const Genus2Curve& c, int which, const EllipticPoint& raw) {
    if (raw.infinity) throw input_error("pullback: affine quotient point required");
    if (raw.y == 0) throw input_error("pullback: point of order two has no divisor pullback here");
    Rational u = raw.x;
    Rational x_squared;
    if (which == 1) {
        x_squared = u;
    } else if (which == 2) {
        if (u == 0) throw input_error("pullback: u = 0 is not on the second chart");
        x_squared = 1 / u;
    } else {
        throw input_error("pullback: chart must be 1 or 2");
    }
    if (x_squared == 0) {
        Rational y = raw.y;
        CurvePoint pt{QuadElement::rational(0), QuadElement::rational(y)};
        return make_divisor_class(c, pt, pt);
    }
    auto [s, r] = squarefree_part(x_squared);
    if (r < 0) r = -r;
    if (s == 1) {
        // rational pair (r, y(r)), (-r, y(-r))
        Rational x1 = r;
        Rational y1 = which == 1 ? raw.y : raw.y * x1 * x1 * x1;
        Rational y2 = which == 1 ? raw.y : -y1;
        CurvePoint p1{QuadElement::rational(x1), QuadElement::rational(y1)};
        CurvePoint p2{QuadElement::rational(-x1), QuadElement::rational(y2)};
        return make_divisor_class(c, p1, p2);
    }
    QuadElement x1(0, r, s);
    QuadElement y1 = which == 1
                         ? QuadElement::rational(raw.y, s)
                         : QuadElement(0, raw.y * r * r * r * Rational(s), s);  // y = w * x^3
    CurvePoint p1{x1, y1};
    CurvePoint p2{quad_conj(x1), quad_conj(y1)};
    return make_divisor_class(c, p1, p2);
}

}  // namespace sectobs
