#pragma once

#include "sectobs/integers.hpp"
#include "sectobs/quadratic.hpp"

#include <algorithm>
#include <utility>
#include <vector>

namespace sectobs {

/// Dense univariate polynomial over Q, coefficients low to high.
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }
    static Poly constant(Rational v) { return Poly({std::move(v)}); }
    static Poly x_power(size_t k, Rational lead = 1) {
        std::vector<Rational> c(k + 1, Rational(0));
        c[k] = std::move(lead);
        return Poly(std::move(c));
    }

    int degree() const { return int(c_.size()) - 1; }  // -1 for the zero polynomial
    bool is_zero() const { return c_.empty(); }
    const Rational& operator[](size_t i) const {
        static const Rational zero(0);
        return i < c_.size() ? c_[i] : zero;
    }
    const std::vector<Rational>& coeffs() const { return c_; }
    const Rational& leading() const {
        if (is_zero()) throw std::domain_error("leading coefficient of zero polynomial");
        return c_.back();
    }

    Rational eval(const Rational& x) const {
        Rational r = 0;
        for (size_t i = c_.size(); i-- > 0;) r = r * x + c_[i];
        return r;
    }

    QuadElement eval(const QuadElement& x) const {
        QuadElement r = QuadElement::rational(0, x.d);
        for (size_t i = c_.size(); i-- > 0;) r = quad_add(quad_mul(r, x), QuadElement::rational(c_[i], x.d));
        return r;
    }

    Poly derivative() const {
        if (c_.size() <= 1) return Poly();
        std::vector<Rational> d(c_.size() - 1);
        for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = Rational(Integer(i)) * c_[i];
        return Poly(std::move(d));
    }

    /// x^n * p(1/x) for n = degree: the reversed coefficient vector.
    Poly reversed() const {
        std::vector<Rational> r(c_.rbegin(), c_.rend());
        return Poly(std::move(r));
    }

    Poly shifted(const Rational& a) const {  // p(x + a)
        Poly result;
        Poly binom = Poly::constant(1);
        Poly lin({a, 1});
        for (size_t i = 0; i < c_.size(); ++i) {
            result = result + binom * Poly::constant(c_[i]);
            binom = binom * lin;
        }
        return result;
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<Rational> r(std::max(a.c_.size(), b.c_.size()), Rational(0));
        for (size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
        for (size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
        return Poly(std::move(r));
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        std::vector<Rational> r(std::max(a.c_.size(), b.c_.size()), Rational(0));
        for (size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
        for (size_t i = 0; i < b.c_.size(); ++i) r[i] -= b.c_[i];
        return Poly(std::move(r));
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<Rational> r(a.c_.size() + b.c_.size() - 1, Rational(0));
        for (size_t i = 0; i < a.c_.size(); ++i)
            for (size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return Poly(std::move(r));
    }
    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }

    /// Euclidean division: returns (quotient, remainder).
    std::pair<Poly, Poly> divmod(const Poly& divisor) const {
        if (divisor.is_zero()) throw std::domain_error("polynomial division by zero");
        std::vector<Rational> rem = c_;
        std::vector<Rational> quot;
        int dd = divisor.degree();
        while (int(rem.size()) - 1 >= dd) {
            Rational factor = rem.back() / divisor.leading();
            size_t shift = rem.size() - 1 - dd;
            if (quot.size() < shift + 1) quot.resize(shift + 1, Rational(0));
            quot[shift] = factor;
            for (int i = 0; i <= dd; ++i) rem[shift + i] -= factor * divisor[i];
            while (!rem.empty() && rem.back() == 0) rem.pop_back();
            if (rem.empty()) break;
        }
        return {Poly(std::move(quot)), Poly(std::move(rem))};
    }

    Poly monic() const {
        if (is_zero()) return *this;
        std::vector<Rational> r = c_;
        for (auto& x : r) x /= c_.back();
        return Poly(std::move(r));
    }

    /// Clears denominators and content: returns (integer coefficients, scale)
    /// with scale * p having the returned primitive integer coefficients.
    std::pair<std::vector<Integer>, Rational> primitive_integer_coeffs() const {
        if (is_zero()) return {{}, Rational(1)};
        Integer l = 1;
        for (const auto& q : c_) l = l / gcd_int(l, den(q)) * den(q);
        std::vector<Integer> ints(c_.size());
        Integer g = 0;
        for (size_t i = 0; i < c_.size(); ++i) {
            ints[i] = num(c_[i]) * (l / den(c_[i]));
            g = gcd_int(g, ints[i]);
        }
        for (auto& v : ints) v /= g;
        return {ints, Rational(l, g)};
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<Rational> c_;
};

inline Rational rational_pow(const Rational& q, unsigned e) {
    Rational r = 1;
    for (unsigned i = 0; i < e; ++i) r *= q;
    return r;
}

/// Resultant via the Sylvester matrix (rational Gaussian elimination).
inline Rational resultant(const Poly& f, const Poly& g) {
    int m = f.degree(), n = g.degree();
    if (m < 0 || n < 0) return 0;
    if (m == 0) return rational_pow(f[0], unsigned(n));
    if (n == 0) return rational_pow(g[0], unsigned(m));
    int size = m + n;
    std::vector<std::vector<Rational>> a(size, std::vector<Rational>(size, Rational(0)));
    for (int row = 0; row < n; ++row)
        for (int j = 0; j <= m; ++j) a[row][row + j] = f[m - j];
    for (int row = 0; row < m; ++row)
        for (int j = 0; j <= n; ++j) a[n + row][row + j] = g[n - j];
    Rational det = 1;
    for (int col = 0; col < size; ++col) {
        int pivot = -1;
        for (int r = col; r < size; ++r)
            if (a[r][col] != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0) return 0;
        if (pivot != col) {
            std::swap(a[pivot], a[col]);
            det = -det;
        }
        det *= a[col][col];
        for (int r = col + 1; r < size; ++r) {
            if (a[r][col] == 0) continue;
            Rational factor = a[r][col] / a[col][col];
            for (int j = col; j < size; ++j) a[r][j] -= factor * a[col][j];
        }
    }
    return det;
}

inline Rational poly_discriminant(const Poly& f) {
    int n = f.degree();
    if (n < 1) throw std::domain_error("discriminant needs degree >= 1");
    Rational r = resultant(f, f.derivative()) / f.leading();
    if ((n * (n - 1) / 2) % 2) r = -r;
    return r;
}

namespace detail {

inline int sign_of(const Rational& q) { return q > 0 ? 1 : (q < 0 ? -1 : 0); }

}  // namespace detail

/// Number of distinct real roots, by Sturm's theorem.
inline int count_real_roots(const Poly& f) {
    if (f.degree() <= 0) return 0;
    std::vector<Poly> chain{f, f.derivative()};
    while (chain.back().degree() > 0) {
        Poly rem = chain[chain.size() - 2].divmod(chain.back()).second;
        if (rem.is_zero()) break;  // repeated roots: chain ends at the gcd
        chain.push_back(Poly() - rem);
    }
    auto variations = [&](int dir) {  // dir = +1 for +inf, -1 for -inf
        int count = 0, prev = 0;
        for (const Poly& p : chain) {
            if (p.is_zero()) continue;
            int s = detail::sign_of(p.leading());
            if (dir < 0 && p.degree() % 2 == 1) s = -s;
            if (prev != 0 && s != 0 && s != prev) ++count;
            if (s != 0) prev = s;
        }
        return count;
    };
    return variations(-1) - variations(+1);
}

}  // namespace sectobs
