#pragma once

#include "sectobs/factor.hpp"
#include "sectobs/integers.hpp"
#include "sectobs/multiquad.hpp"
#include "sectobs/polynomial.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace sectobs {

/// Raised when F has an irreducible factor of degree >= 3, which the
/// quadratic-field machinery downstream cannot represent.
struct unsupported_factor_profile : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Y^2 = F(X) with F of exact degree 6 and nonzero discriminant.
struct Genus2Curve {
    std::array<Rational, 7> f{};  // f[i] multiplies X^i

    Poly poly() const { return Poly(std::vector<Rational>(f.begin(), f.end())); }
    const Rational& leading() const { return f[6]; }

    Rational eval(const Rational& x) const { return poly().eval(x); }
};

inline Rational discriminant(const Genus2Curve& c) { return poly_discriminant(c.poly()); }

inline Genus2Curve make_curve(const std::array<Rational, 7>& coeffs) {
    if (coeffs[6] == 0) throw input_error("curve: leading coefficient f6 must be nonzero");
    Genus2Curve c{coeffs};
    if (discriminant(c) == 0) throw input_error("curve: discriminant vanishes (singular model)");
    return c;
}

/// Y^2 = 2(X^2 + p)(X^2 + 2p)(X^2 + a).
inline Genus2Curve family_curve(const Integer& p, const Integer& a) {
    if (!is_probable_prime(p)) throw input_error("family curve: p must be prime");
    if (p % 8 != 7) throw input_error("family curve: p = 7 mod 8 required");
    if (a == p) throw input_error("family curve: a = p excluded");
    if (a == 2 * p) throw input_error("family curve: a = 2p excluded");
    if (a == 0) throw input_error("family curve: a = 0 gives a singular model");
    Poly F = Poly::constant(2) * Poly({Rational(p), 0, 1}) * Poly({Rational(2 * p), 0, 1}) *
             Poly({Rational(a), 0, 1});
    std::array<Rational, 7> coeffs{};
    for (int i = 0; i <= 6; ++i) coeffs[size_t(i)] = F[size_t(i)];
    return make_curve(coeffs);
}

/// Monic irreducible factor of degree 1 or 2. For quadratics X^2 + sX + t
/// the root is theta = (-s + e*sqrt(d))/2 with d squarefree, e > 0.
struct IrreducibleFactor {
    Poly monic;
    Integer d = 1;
    Rational e = 0;

    int degree() const { return monic.degree(); }
    Rational linear_root() const { return -monic[0]; }
    QuadElement theta() const {
        if (degree() != 2) throw std::logic_error("theta: factor is not quadratic");
        return QuadElement(-monic[1] / 2, e / 2, d);
    }
    QuadElement theta_conj() const { return quad_conj(theta()); }
};

struct FactoredSextic {
    Rational unit;  // leading coefficient of F
    std::vector<IrreducibleFactor> factors;

    Poly product() const {
        Poly acc = Poly::constant(unit);
        for (const auto& fac : factors) acc = acc * fac.monic;
        return acc;
    }
};

namespace detail {

/// All rational roots of p (squarefree input, so no multiplicities).
inline std::vector<Rational> rational_roots(const Poly& p) {
    std::vector<Rational> out;
    Poly q = p;
    if (q.is_zero()) return out;
    if (q[0] == 0) {
        out.emplace_back(0);
        q = q.divmod(Poly({0, 1})).first;
    }
    if (q.degree() < 1) return out;
    auto [ints, scale] = q.primitive_integer_coeffs();
    for (const Integer& dn : divisors(abs_int(ints[0])))
        for (const Integer& dd : divisors(abs_int(ints.back()))) {
            if (gcd_int(dn, dd) != 1) continue;
            for (int sign : {1, -1}) {
                Rational cand(sign * dn, dd);
                if (q.eval(cand) == 0) out.push_back(cand);
            }
        }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline IrreducibleFactor make_linear(const Rational& root) {
    return IrreducibleFactor{Poly({-root, 1}), 1, 0};
}

inline IrreducibleFactor make_quadratic(const Poly& monic) {
    Rational disc = monic[1] * monic[1] - 4 * monic[0];
    auto [d, e] = squarefree_part(disc);
    if (e < 0) e = -e;
    if (d == 1) throw std::logic_error("make_quadratic: polynomial is reducible");
    return IrreducibleFactor{monic, d, e};
}

/// Splits a monic quartic with no rational roots into two monic quadratics
/// over Q, or reports irreducibility.
inline std::optional<std::pair<Poly, Poly>> split_quartic(const Poly& quartic) {
    Rational shift = quartic[3] / 4;
    Poly dep = quartic.shifted(-shift);  // y^4 + p y^2 + q y + r
    Rational p = dep[2], q = dep[1], r = dep[0];
    auto undo = [&](const Poly& g) { return g.shifted(shift); };
    if (q == 0) {
        // even quartic: either z^2 + pz + r splits, or the cross form does
        if (auto n = sqrt_exact(p * p - 4 * r)) {
            Rational z1 = (-p + *n) / 2, z2 = (-p - *n) / 2;
            return std::pair<Poly, Poly>{undo(Poly({-z1, 0, 1})), undo(Poly({-z2, 0, 1}))};
        }
        if (auto b = sqrt_exact(r)) {
            for (const Rational& bb : {*b, -*b}) {
                if (auto a = sqrt_exact(2 * bb - p)) {
                    if (*a == 0) continue;
                    return std::pair<Poly, Poly>{undo(Poly({bb, *a, 1})), undo(Poly({bb, -*a, 1}))};
                }
            }
        }
        return std::nullopt;
    }
    // resolvent cubic in z = a^2 for (y^2+ay+b)(y^2-ay+c)
    Poly resolvent({-q * q, p * p - 4 * r, 2 * p, 1});
    for (const Rational& z : rational_roots(resolvent)) {
        if (z <= 0) continue;
        auto a = sqrt_exact(z);
        if (!a) continue;
        Rational b = (p + z - q / *a) / 2;
        Rational c = (p + z + q / *a) / 2;
        if (b * c != r) continue;
        return std::pair<Poly, Poly>{undo(Poly({b, *a, 1})), undo(Poly({c, -*a, 1}))};
    }
    return std::nullopt;
}

inline bool is_even_poly(const Poly& p) {
    for (int i = 1; i <= p.degree(); i += 2)
        if (p[size_t(i)] != 0) return false;
    return true;
}

}  // namespace detail

/// Exact factorization of F over Q within the supported profile (products
/// of linear and quadratic irreducibles; covers every even sextic after
/// u = X^2). Degree >= 3 irreducible factors raise a typed error.
inline FactoredSextic factor_sextic(const Genus2Curve& c) {
    FactoredSextic out;
    out.unit = c.leading();
    Poly rest = c.poly().monic();

    for (const Rational& root : detail::rational_roots(rest)) {
        out.factors.push_back(detail::make_linear(root));
        rest = rest.divmod(Poly({-root, 1})).first;
    }

    auto push_quartic = [&](const Poly& quartic) {
        auto split = detail::split_quartic(quartic);
        if (!split) throw unsupported_factor_profile("irreducible quartic factor");
        out.factors.push_back(detail::make_quadratic(split->first));
        out.factors.push_back(detail::make_quadratic(split->second));
    };

    switch (rest.degree()) {
        case 0:
            break;
        case 2:
            out.factors.push_back(detail::make_quadratic(rest));
            break;
        case 4:
            push_quartic(rest);
            break;
        case 6: {
            if (!detail::is_even_poly(rest))
                throw unsupported_factor_profile("non-even sextic cofactor without rational roots");
            Poly h({rest[0], rest[2], rest[4], 1});  // rest = h(X^2), h monic cubic
            Poly hrest = h;
            for (const Rational& u0 : detail::rational_roots(h)) {
                out.factors.push_back(detail::make_quadratic(Poly({-u0, 0, 1})));
                hrest = hrest.divmod(Poly({-u0, 1})).first;
            }
            if (hrest.degree() == 3)
                throw unsupported_factor_profile("irreducible cubic in X^2 (degree-6 factor profile)");
            if (hrest.degree() == 2)
                push_quartic(Poly({hrest[0], 0, hrest[1], 0, 1}));
            break;
        }
        default:
            throw unsupported_factor_profile("irreducible factor of degree >= 3");
    }

    if (!(out.product() == c.poly()))
        throw internal_defect("factor_sextic: factorization does not multiply back");
    return out;
}

struct LemmaConditions {
    bool cond_i = false;   // F has no rational root
    bool cond_ii = false;  // no rational-or-conjugate split into two root triples
};

/// Conditions (i) and (ii): (ii) enumerates all 10 partitions of the six
/// roots into two triples and tests, inside the splitting field, whether
/// both triples have rational symmetric functions or lie in a common
/// quadratic field exchanged by its conjugation.
inline LemmaConditions lemma_conditions(const FactoredSextic& fs) {
    LemmaConditions out;
    out.cond_i = true;
    for (const auto& fac : fs.factors)
        if (fac.degree() == 1) out.cond_i = false;

    SquareClassBasis basis;
    struct Embedding {
        unsigned mask;
        Rational scale;
    };
    std::vector<Embedding> fields;
    for (const auto& fac : fs.factors) {
        if (fac.degree() == 2) {
            auto [mask, r] = basis.decompose_or_insert(fac.d);
            fields.push_back({mask, r});
        } else {
            fields.push_back({0, 0});
        }
    }

    std::vector<MultiQuadElement> roots;
    for (size_t i = 0; i < fs.factors.size(); ++i) {
        const auto& fac = fs.factors[i];
        if (fac.degree() == 1) {
            roots.push_back(MultiQuadElement::rational(&basis, fac.linear_root()));
        } else {
            // theta = (-s +- e*sqrt(d))/2, sqrt(d) = scale * radical(mask)
            MultiQuadElement half_s = MultiQuadElement::rational(&basis, -fac.monic[1] / 2);
            MultiQuadElement rad =
                MultiQuadElement::radical(&basis, fields[i].mask, fac.e * fields[i].scale / 2);
            roots.push_back(half_s + rad);
            roots.push_back(half_s - rad);
        }
    }
    if (roots.size() != 6) throw internal_defect("lemma_conditions: expected six roots");

    auto symmetric = [&](const std::vector<size_t>& idx) {
        const auto& r0 = roots[idx[0]];
        const auto& r1 = roots[idx[1]];
        const auto& r2 = roots[idx[2]];
        return std::array<MultiQuadElement, 3>{r0 + r1 + r2, r0 * r1 + r0 * r2 + r1 * r2,
                                               r0 * r1 * r2};
    };

    bool violated = false;
    for (size_t j = 1; j < 6 && !violated; ++j)
        for (size_t k = j + 1; k < 6 && !violated; ++k) {
            std::vector<size_t> a{0, j, k}, b;
            for (size_t m = 1; m < 6; ++m)
                if (m != j && m != k) b.push_back(m);
            auto ea = symmetric(a), eb = symmetric(b);
            std::set<unsigned> masks;
            for (const auto& v : ea)
                for (unsigned m : v.nonzero_masks()) masks.insert(m);
            for (const auto& v : eb)
                for (unsigned m : v.nonzero_masks()) masks.insert(m);
            if (masks.empty()) {
                violated = true;  // both triples defined over Q
            } else if (masks.size() == 1) {
                unsigned m = *masks.begin();
                bool conjugate = true;
                for (int t = 0; t < 3; ++t)
                    if (!(eb[size_t(t)] == ea[size_t(t)].subfield_conj(m))) conjugate = false;
                if (conjugate) violated = true;
            }
        }
    out.cond_ii = !violated;
    return out;
}

}  // namespace sectobs
