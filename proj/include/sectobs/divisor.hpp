#pragma once

#include "sectobs/curve.hpp"
#include "sectobs/quadratic.hpp"

#include <vector>

namespace sectobs {

struct CurvePoint {
    QuadElement x;
    QuadElement y;
};

/// The class {P1, P2} = [P1 + P2 - oo+ - oo-]. Points are either both
/// rational (field_d = 1) or quadratic conjugates sharing one field tag.
struct DivisorClass {
    CurvePoint p1;
    CurvePoint p2;
    Integer field_d = 1;
    bool weierstrass = false;
};

inline bool point_on_curve(const Genus2Curve& c, const CurvePoint& p) {
    QuadElement rhs = c.poly().eval(p.x);
    return quad_equal(quad_mul(p.y, p.y), rhs);
}

inline DivisorClass make_divisor_class(const Genus2Curve& c, CurvePoint p1, CurvePoint p2) {
    Integer d = p1.x.d;
    if (p2.x.d != d || p1.y.d != d || p2.y.d != d)
        throw input_error("divisor class: mixed field tags");
    if (d != 1) {
        bool conj = quad_equal(p2.x, quad_conj(p1.x)) && quad_equal(p2.y, quad_conj(p1.y));
        if (!conj) throw input_error("divisor class: quadratic points must be conjugate");
        if (p1.x.is_rational() && p1.y.is_rational()) d = 1;  // degenerate tag
    }
    if (!point_on_curve(c, p1) || !point_on_curve(c, p2))
        throw input_error("divisor class: point not on curve");
    bool w = p1.y.is_zero() && p2.y.is_zero();
    return DivisorClass{std::move(p1), std::move(p2), d, w};
}

/// Weierstrass class of an irreducible quadratic divisor of F.
inline DivisorClass weierstrass_class(const Genus2Curve& c, const IrreducibleFactor& fac) {
    QuadElement zero = QuadElement::rational(0, fac.d);
    return make_divisor_class(c, CurvePoint{fac.theta(), zero},
                              CurvePoint{fac.theta_conj(), zero});
}

inline DivisorClass weierstrass_class(const Genus2Curve& c, const Rational& r1, const Rational& r2) {
    QuadElement zero = QuadElement::rational(0, 1);
    return make_divisor_class(c, CurvePoint{QuadElement::rational(r1, 1), zero},
                              CurvePoint{QuadElement::rational(r2, 1), zero});
}

struct TwoTorsionClass {
    DivisorClass divisor;
    Poly quadratic;      // the monic rational quadratic divisor of F
    unsigned root_mask;  // which of the six roots it carries
};

struct TwoTorsionBasis {
    int dimension = 0;
    std::vector<TwoTorsionClass> classes;  // all 2^t - 1 nontrivial classes
    std::vector<size_t> basis_indices;     // a basis among `classes`
};

/// Rational 2-torsion of J from the rational quadratic divisors of F:
/// the quadratic irreducible factors plus products of two linear factors.
/// Group structure lives in F_2^6 modulo the full root set.
inline TwoTorsionBasis two_torsion(const Genus2Curve& c, const FactoredSextic& fs) {
    TwoTorsionBasis out;

    std::vector<unsigned> slot_of_factor;  // first root slot per factor
    unsigned next_slot = 0;
    for (const auto& fac : fs.factors) {
        slot_of_factor.push_back(next_slot);
        next_slot += unsigned(fac.degree());
    }
    if (next_slot != 6) throw internal_defect("two_torsion: expected six roots total");
    const unsigned full = 0b111111;

    for (size_t i = 0; i < fs.factors.size(); ++i) {
        const auto& fac = fs.factors[i];
        if (fac.degree() != 2) continue;
        unsigned mask = 3u << slot_of_factor[i];
        out.classes.push_back({weierstrass_class(c, fac), fac.monic, mask});
    }
    for (size_t i = 0; i < fs.factors.size(); ++i) {
        if (fs.factors[i].degree() != 1) continue;
        for (size_t j = i + 1; j < fs.factors.size(); ++j) {
            if (fs.factors[j].degree() != 1) continue;
            Rational r1 = fs.factors[i].linear_root(), r2 = fs.factors[j].linear_root();
            unsigned mask = (1u << slot_of_factor[i]) | (1u << slot_of_factor[j]);
            out.classes.push_back(
                {weierstrass_class(c, r1, r2), fs.factors[i].monic * fs.factors[j].monic, mask});
        }
    }

    // rank over F_2 modulo the all-roots relation, with a greedy basis
    std::array<unsigned, 6> pivot{};
    auto insert = [&](unsigned v) {
        while (v) {
            int hb = 31 - __builtin_clz(v);
            if (!pivot[size_t(hb)]) {
                pivot[size_t(hb)] = v;
                return true;
            }
            v ^= pivot[size_t(hb)];
        }
        return false;
    };
    insert(full);
    for (size_t i = 0; i < out.classes.size(); ++i)
        if (insert(out.classes[i].root_mask)) out.basis_indices.push_back(i);
    out.dimension = int(out.basis_indices.size());
    if (out.classes.size() + 1 != (size_t(1) << out.dimension))
        throw internal_defect("two_torsion: class count does not match 2^t - 1");
    return out;
}

}  // namespace sectobs
