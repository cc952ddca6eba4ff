#pragma once

#include "sectobs/curve.hpp"
#include "sectobs/padic.hpp"
#include "sectobs/polynomial.hpp"

#include <future>
#include <optional>
#include <string>
#include <vector>

namespace sectobs {

struct LocalWitness {
    std::string chart;  // "affine" or "infinity"
    std::string kind;   // "exact-root", "square-value" or "hensel-root"
    Rational coordinate;
    int value_valuation = 0;
    Integer y_approx = 0;  // sqrt of the chart value mod p^precision
    unsigned precision = 0;
};

struct LocalReport {
    Place place;
    bool solvable = false;
    std::optional<LocalWitness> witness;
    unsigned exhaustion_depth = 0;  // deepest disc refuted when unsolvable
    std::string note;
};

namespace detail {

/// y^2 = F(x) and s^2 = x^6 F(1/x) share solvability with their
/// denominator-cleared integer models; both charts are explored there.
struct IntegerChart {
    std::vector<Integer> coeffs;  // low to high
    Integer eval(const Integer& x) const {
        Integer r = 0;
        for (size_t i = coeffs.size(); i-- > 0;) r = r * x + coeffs[i];
        return r;
    }
    Integer eval_derivative(const Integer& x) const {
        Integer r = 0;
        for (size_t i = coeffs.size(); i-- > 1;) r = r * x + Integer(i) * coeffs[i];
        return r;
    }
    Poly poly() const {
        std::vector<Rational> c(coeffs.begin(), coeffs.end());
        return Poly(std::move(c));
    }
};

inline IntegerChart integer_model(const Poly& f) {
    // multiply by l^2 (l = lcm of denominators): a square multiple, so the
    // chart has integer coefficients and unchanged local solvability
    Integer l = 1;
    for (int i = 0; i <= f.degree(); ++i) l = l / gcd_int(l, den(f[size_t(i)])) * den(f[size_t(i)]);
    IntegerChart chart;
    chart.coeffs.resize(size_t(f.degree()) + 1);
    for (int i = 0; i <= f.degree(); ++i) {
        Rational v = f[size_t(i)] * Rational(l * l);
        if (den(v) != 1) throw internal_defect("integer_model: clearing failed");
        chart.coeffs[size_t(i)] = num(v);
    }
    return chart;
}

struct DiscSearch {
    const IntegerChart& chart;
    const Integer& p;
    unsigned slack;      // 1 for odd p, 3 for p = 2
    unsigned depth_cap;  // completeness bound; exceeding it is a defect
    unsigned deepest_rejection = 0;

    std::optional<LocalWitness> decide(const Integer& center, unsigned k) {
        Integer value = chart.eval(center);
        if (value == 0)
            return LocalWitness{"", "exact-root", Rational(center), 0, 0, 0};
        if (is_square_in_Qp(Rational(value), p)) {
            int w = valuation(value, p);
            unsigned prec = unsigned(w) + slack + 6;
            Integer unit = value / pow_int(p, unsigned(w));
            Integer root = sqrt_unit_mod_pk(((unit % pow_int(p, prec)) + pow_int(p, prec)) % pow_int(p, prec),
                                            p, prec);
            Integer y = root * pow_int(p, unsigned(w) / 2) % pow_int(p, prec);
            return LocalWitness{"", "square-value", Rational(center), w, y, prec};
        }
        unsigned w = unsigned(valuation(value, p));
        if (k >= w + slack) {  // value class constant on this disc: refuted
            deepest_rejection = std::max(deepest_rejection, k);
            return std::nullopt;
        }
        Integer dvalue = chart.eval_derivative(center);
        if (dvalue != 0) {
            unsigned wd = unsigned(valuation(dvalue, p));
            if (w > 2 * wd)  // simple root of the chart nearby: y = 0 point
                return LocalWitness{"", "hensel-root", Rational(center), int(w), 0, 0};
        }
        if (k >= depth_cap)
            throw internal_defect("local point search: completeness bound exceeded");
        Integer step = pow_int(p, k);
        for (Integer j = 0; j < p; ++j) {
            if (auto w_ = decide(center + j * step, k + 1)) return w_;
        }
        return std::nullopt;
    }
};

inline unsigned chart_depth_cap(const IntegerChart& chart, const Integer& p) {
    Rational disc = poly_discriminant(chart.poly());
    Integer mass = 16 * num(disc) * chart.coeffs.back();
    return unsigned(valuation(mass, p)) + 4;
}

}  // namespace detail

/// Complete decision of C(Q_p) != {} by residue-disc refinement over both
/// charts. A positive answer carries a replayable witness; a negative one
/// records the exhaustion depth.
inline LocalReport has_Qp_point(const Genus2Curve& c, const Integer& p) {
    LocalReport report{Place::prime(p)};
    detail::IntegerChart affine = detail::integer_model(c.poly());
    detail::IntegerChart infinity;
    infinity.coeffs.assign(affine.coeffs.rbegin(), affine.coeffs.rend());
    while (!infinity.coeffs.empty() && infinity.coeffs.back() == 0) infinity.coeffs.pop_back();

    unsigned slack = p == 2 ? 3 : 1;
    detail::DiscSearch aff{affine, p, slack, detail::chart_depth_cap(affine, p)};
    if (auto w = aff.decide(0, 0)) {
        w->chart = "affine";
        report.solvable = true;
        report.witness = std::move(w);
        return report;
    }
    detail::DiscSearch inf{infinity, p, slack, detail::chart_depth_cap(infinity, p)};
    if (auto w = inf.decide(0, 1)) {
        w->chart = "infinity";
        report.solvable = true;
        report.witness = std::move(w);
        return report;
    }
    report.solvable = false;
    report.exhaustion_depth = std::max(aff.deepest_rejection, inf.deepest_rejection);
    return report;
}

/// F attains a nonnegative value over R iff f6 > 0 or F has a real root
/// (exact Sturm count; maxima of a negative-leading sextic are roots-free
/// only when F < 0 everywhere).
inline LocalReport has_real_point(const Genus2Curve& c) {
    LocalReport report{Place::real()};
    if (c.leading() > 0) {
        report.solvable = true;
        report.note = "positive leading coefficient";
        return report;
    }
    int roots = count_real_roots(c.poly());
    report.solvable = roots > 0;
    report.note = "Sturm real-root count = " + std::to_string(roots);
    return report;
}

/// For Y^2 = 2(X^2+p)(X^2+2p)(X^2+a): a point at infinity or a Weierstrass
/// point exists whenever 2, -p or -2p is a square in the completion.
inline std::optional<bool> family_fast_path(const Integer& p, const Integer& a, const Place& place) {
    (void)a;
    for (const Rational& q : {Rational(2), Rational(-p), Rational(-2 * p)})
        if (is_square_in_Qp(q, place)) return true;
    return std::nullopt;
}

/// Places where solvability is not automatic: 2, all p <= 13, and the
/// primes of disc(F) and f6. At any other odd prime the reduction is a
/// smooth genus-2 curve, whose F_p-points (Weil: at least p+1-4*sqrt(p) > 0
/// for p >= 17) lift by Hensel.
inline std::vector<Integer> relevant_primes(const Genus2Curve& c) {
    std::set<Integer> ps{2, 3, 5, 7, 11, 13};
    Rational disc = discriminant(c);
    for (const auto& s : {prime_support(disc), prime_support(c.leading())})
        ps.insert(s.begin(), s.end());
    return {ps.begin(), ps.end()};
}

struct LocalAnalysis {
    bool everywhere_solvable = false;
    std::vector<LocalReport> reports;  // real place first, then primes ascending
    std::string skipped_justification;
};

inline LocalAnalysis is_everywhere_locally_solvable(
    const Genus2Curve& c, const std::optional<std::pair<Integer, Integer>>& family = std::nullopt) {
    LocalAnalysis out;
    std::vector<Integer> primes = relevant_primes(c);

    auto check_place = [&](const Place& place) -> LocalReport {
        if (family) {
            if (auto fast = family_fast_path(family->first, family->second, place); fast && *fast) {
                LocalReport r{place};
                r.solvable = true;
                r.note = "family fast path: one of 2, -p, -2p is a local square";
                return r;
            }
        }
        if (place.is_real()) return has_real_point(c);
        return has_Qp_point(c, place.p());
    };

    std::vector<std::future<LocalReport>> jobs;
    jobs.push_back(std::async(std::launch::deferred, check_place, Place::real()));
    for (const Integer& p : primes)
        jobs.push_back(std::async(std::launch::async, check_place, Place::prime(p)));
    out.everywhere_solvable = true;
    for (auto& j : jobs) {
        out.reports.push_back(j.get());
        if (!out.reports.back().solvable) out.everywhere_solvable = false;
    }
    out.skipped_justification =
        "odd primes of good reduction above 13 omitted: a smooth genus-2 curve over F_p has "
        "p+1-4*sqrt(p) > 0 points for p >= 17, and a smooth point lifts to Q_p";
    return out;
}

/// Re-checks a positive witness against the model: the value really is a
/// certified square (or root) and Newton iteration improves quadratically.
inline bool verify_local_witness(const Genus2Curve& c, const Integer& p, const LocalWitness& w) {
    detail::IntegerChart chart = detail::integer_model(c.poly());
    if (w.chart == "infinity") {
        detail::IntegerChart inf;
        inf.coeffs.assign(chart.coeffs.rbegin(), chart.coeffs.rend());
        while (!inf.coeffs.empty() && inf.coeffs.back() == 0) inf.coeffs.pop_back();
        chart = inf;
    }
    if (den(w.coordinate) != 1) return false;
    Integer value = chart.eval(num(w.coordinate));
    if (w.kind == "exact-root") return value == 0;
    if (w.kind == "hensel-root") {
        Integer d = chart.eval_derivative(num(w.coordinate));
        if (value == 0) return true;
        if (d == 0) return false;
        return valuation(value, p) > 2 * valuation(d, p);
    }
    if (w.kind != "square-value") return false;
    if (value == 0 || !is_square_in_Qp(Rational(value), p)) return false;
    int v = valuation(value, p);
    if (v != w.value_valuation || v % 2 != 0) return false;
    unsigned slack = p == 2 ? 3 : 1;
    if (w.precision < unsigned(v) + slack) return false;
    Integer pk = pow_int(p, w.precision);
    if ((w.y_approx * w.y_approx - value) % pk != 0) return false;
    // quadratic improvement of Newton's map for three steps
    Rational y(w.y_approx);
    Rational target(value);
    if (y * y == target) return true;
    int err = valuation(y * y - target, p);
    for (int step = 0; step < 3; ++step) {
        y = (y + target / y) / 2;
        if (y * y == target) return true;  // converged exactly
        int next = valuation(y * y - target, p);
        // error maps to error^2 / (4 y^2)
        int expected = 2 * err - v - (p == 2 ? 2 : 0);
        if (next < expected) return false;
        err = next;
    }
    return true;
}

}  // namespace sectobs
