#pragma once

#include "sectobs/curve.hpp"
#include "sectobs/divisor.hpp"
#include "sectobs/quadratic.hpp"

#include <set>
#include <vector>

namespace sectobs {

/// An element of (L_1*/(L_1*)^2 x ... x L_m*/(L_m*)^2) / ~, one square
/// class per irreducible factor of F, where ~ identifies tuples differing
/// by a common rational w.
struct BooleanClass {
    std::vector<SquareClass> components;
};

inline BooleanClass trivial_boolean_class(const FactoredSextic& fs) {
    BooleanClass out;
    for (const auto& fac : fs.factors)
        out.components.emplace_back(QuadElement::rational(1, fac.d));
    return out;
}

namespace detail {

/// (x1 - theta)(x2 - theta) for a conjugate pair is M(theta) with M the
/// pair's characteristic polynomial. A vanishing factor (a Weierstrass
/// point sitting on the factor's own roots) is replaced by F'(x): with y
/// as uniformizer at (x, 0), (x - theta) = y^2 * (x - theta)/F(x), whose
/// value there is 1/F'(theta) ~ F'(theta) modulo squares.
inline QuadElement mu_component(const Genus2Curve& c, const IrreducibleFactor& fac,
                                const DivisorClass& d) {
    const Poly F = c.poly();
    const Poly dF = F.derivative();
    if (d.field_d == 1) {
        QuadElement acc = QuadElement::rational(1, fac.d);
        for (const CurvePoint* pt : {&d.p1, &d.p2}) {
            Rational x = pt->x.a;
            QuadElement factor = QuadElement::rational(1, fac.d);
            if (fac.degree() == 1 && x == fac.linear_root()) {
                factor = QuadElement::rational(dF.eval(x), fac.d);
            } else if (fac.degree() == 1) {
                factor = QuadElement::rational(x - fac.linear_root(), fac.d);
            } else {
                factor = quad_sub(QuadElement::rational(x, fac.d), fac.theta());
            }
            acc = quad_mul(acc, factor);
        }
        return acc;
    }
    // conjugate pair: M(T) = T^2 - tr(x) T + N(x)
    Poly M({quad_norm(d.p1.x), -quad_trace(d.p1.x), 1});
    bool vanishing = d.weierstrass && fac.degree() == 2 && fac.monic == M;
    if (!vanishing) {
        if (fac.degree() == 1) return QuadElement::rational(M.eval(fac.linear_root()), 1);
        return M.eval(fac.theta());
    }
    QuadElement conj_gap = quad_sub(fac.theta_conj(), fac.theta());
    return quad_mul(dF.eval(fac.theta()), conj_gap);
}

}  // namespace detail

/// The descent homomorphism on {P1, P2} divisor classes.
inline BooleanClass mu(const Genus2Curve& c, const FactoredSextic& fs, const DivisorClass& d) {
    if (!point_on_curve(c, d.p1) || !point_on_curve(c, d.p2))
        throw input_error("mu: divisor is not on the curve");
    BooleanClass out;
    for (const auto& fac : fs.factors) {
        QuadElement comp = detail::mu_component(c, fac, d);
        if (comp.is_zero()) throw internal_defect("mu: vanishing component escaped the correction");
        out.components.emplace_back(comp);
    }
    return out;
}

inline void check_same_shape(const BooleanClass& a, const BooleanClass& b) {
    if (a.components.size() != b.components.size())
        throw input_error("boolean classes over different factorizations");
    for (size_t i = 0; i < a.components.size(); ++i)
        if (a.components[i].d != b.components[i].d)
            throw input_error("boolean class component fields differ");
}

inline BooleanClass classes_product(const BooleanClass& a, const BooleanClass& b) {
    check_same_shape(a, b);
    BooleanClass out;
    for (size_t i = 0; i < a.components.size(); ++i)
        out.components.push_back(square_class_mul(a.components[i], b.components[i]));
    return out;
}

/// Trivial iff some squarefree w makes every component w * c_i a square in
/// its field. The candidate support is the union of the component supports
/// (primes of 2, the d_i and the norms), exhausted with both signs.
inline bool class_is_trivial(const BooleanClass& c) {
    std::set<Integer> support;
    for (const auto& comp : c.components)
        support.insert(comp.support.begin(), comp.support.end());
    if (support.size() > 20) throw internal_defect("class_is_trivial: support set too large");
    std::vector<Integer> primes(support.begin(), support.end());
    for (size_t mask = 0; mask < (size_t(1) << primes.size()); ++mask) {
        Integer w = 1;
        for (size_t i = 0; i < primes.size(); ++i)
            if (mask & (size_t(1) << i)) w *= primes[i];
        for (const Integer& signed_w : {w, Integer(-w)}) {
            bool ok = true;
            for (const auto& comp : c.components) {
                QuadElement scaled = quad_scale(Rational(signed_w), comp.rep);
                if (!quad_is_square(scaled)) {
                    ok = false;
                    break;
                }
            }
            if (ok) return true;
        }
    }
    return false;
}

inline bool classes_equal(const BooleanClass& a, const BooleanClass& b) {
    return class_is_trivial(classes_product(a, b));
}

/// Dimension over F_2 of the span, by exhausting subset products.
inline int f2_rank(const std::vector<BooleanClass>& classes) {
    if (classes.empty()) return 0;
    if (classes.size() > 8) throw input_error("f2_rank: more than 8 classes");
    size_t n = classes.size();
    size_t trivial_count = 0;
    for (size_t mask = 0; mask < (size_t(1) << n); ++mask) {
        BooleanClass acc = classes[0];
        bool any = false;
        for (size_t i = 0; i < n; ++i) {
            if (!(mask & (size_t(1) << i))) continue;
            acc = any ? classes_product(acc, classes[i]) : classes[i];
            any = true;
        }
        if (!any || class_is_trivial(acc)) ++trivial_count;
    }
    size_t kernel_dim = 0;
    while ((size_t(1) << kernel_dim) < trivial_count) ++kernel_dim;
    if ((size_t(1) << kernel_dim) != trivial_count)
        throw internal_defect("f2_rank: trivial-subset count is not a power of 2");
    return int(n - kernel_dim);
}

struct KernelCertificate {
    int expected_rank = 0;  // rank(J) + dim J(Q)[2]
    int image_rank = 0;
    bool verdict = false;  // ker mu = 2J(Q)

    Integer j_mod_2j_order() const { return pow_int(Integer(2), unsigned(expected_rank)); }
};

/// ker mu = 2J(Q) holds when independent generator images fill
/// J(Q)/2J(Q), whose order is 2^(rank + t2dim).
inline KernelCertificate certify_kernel(const std::vector<BooleanClass>& generator_images,
                                        int jac_rank, int t2dim) {
    KernelCertificate out;
    out.expected_rank = jac_rank + t2dim;
    out.image_rank = f2_rank(generator_images);
    out.verdict = out.image_rank == out.expected_rank;
    return out;
}

inline bool no_rational_divisor_class_deg1(const LemmaConditions& lemma,
                                           const KernelCertificate& kernel) {
    return lemma.cond_i && lemma.cond_ii && kernel.verdict;
}

}  // namespace sectobs
