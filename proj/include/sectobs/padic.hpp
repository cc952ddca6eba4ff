#pragma once

#include "sectobs/factor.hpp"
#include "sectobs/integers.hpp"

#include <compare>
#include <string>

namespace sectobs {

/// A place of Q: the real place or a finite prime.
class Place {
public:
    static Place real() { return Place(Integer(0)); }
    static Place prime(Integer p) {
        if (p < 2) throw std::domain_error("Place::prime: p must be >= 2");
        return Place(std::move(p));
    }

    bool is_real() const { return p_ == 0; }
    const Integer& p() const {
        if (is_real()) throw std::logic_error("real place has no prime");
        return p_;
    }

    std::string str() const { return is_real() ? "real" : p_.str(); }

    // real place sorts first, then primes ascending
    friend bool operator<(const Place& a, const Place& b) { return a.p_ < b.p_; }
    friend bool operator==(const Place& a, const Place& b) { return a.p_ == b.p_; }

private:
    explicit Place(Integer p) : p_(std::move(p)) {}
    Integer p_;
};

inline int valuation(Integer n, const Integer& p) {
    if (n == 0) throw std::domain_error("valuation of 0");
    int v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

inline int valuation(const Rational& q, const Integer& p) {
    return valuation(num(q), p) - valuation(den(q), p);
}

/// The p-adic unit u with q = p^v * u, reduced mod p^k (den inverted mod p^k).
inline Integer unit_part_mod(const Rational& q, const Integer& p, unsigned k) {
    Integer n = num(q), d = den(q);
    while (n % p == 0) n /= p;
    while (d % p == 0) d /= p;
    Integer pk = pow_int(p, k);
    Integer dinv = mod_pow(d, pk / p * (p - 1) - 1, pk);  // d^(phi(p^k)-1)
    Integer u = n % pk * dinv % pk;
    if (u < 0) u += pk;
    return u;
}

/// Jacobi symbol (a/n) for odd n > 0.
inline int jacobi(Integer a, Integer n) {
    if (n <= 0 || (n & 1) == 0) throw std::domain_error("jacobi: n must be odd positive");
    a %= n;
    if (a < 0) a += n;
    int result = 1;
    while (a != 0) {
        while ((a & 1) == 0) {
            a >>= 1;
            Integer r = n % 8;
            if (r == 3 || r == 5) result = -result;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) result = -result;
        a %= n;
    }
    return n == 1 ? result : 0;
}

/// Legendre symbol; rejects even or composite p.
inline int legendre(const Integer& a, const Integer& p) {
    if (p == 2 || (p & 1) == 0) throw std::domain_error("legendre: p must be odd");
    if (!is_probable_prime(p)) throw std::domain_error("legendre: p must be prime");
    return jacobi(a, p);
}

inline int legendre(const Rational& a, const Integer& p) {
    return legendre(num(a) * den(a), p);
}

/// Exact squareness in the completion: R needs q > 0; Q_p (p odd) needs even
/// valuation and a residue unit; Q_2 needs even valuation and unit = 1 mod 8.
inline bool is_square_in_Qp(const Rational& q, const Place& place) {
    if (q == 0) throw std::domain_error("is_square_in_Qp: q must be nonzero");
    if (place.is_real()) return q > 0;
    const Integer& p = place.p();
    if (valuation(q, p) % 2 != 0) return false;
    if (p == 2) return unit_part_mod(q, 2, 3) == 1;
    return legendre(unit_part_mod(q, p, 1), p) == 1;
}

inline bool is_square_in_Qp(const Rational& q, const Integer& p) {
    return is_square_in_Qp(q, Place::prime(p));
}

/// Hilbert symbol (a,b) at a place. Serre, A Course in Arithmetic, III.1.
inline int hilbert_symbol(const Rational& a, const Rational& b, const Place& place) {
    if (a == 0 || b == 0) throw std::domain_error("hilbert_symbol: arguments must be nonzero");
    if (place.is_real()) return (a < 0 && b < 0) ? -1 : 1;
    const Integer& p = place.p();
    int alpha = valuation(a, p), beta = valuation(b, p);
    if (p == 2) {
        Integer u = unit_part_mod(a, 2, 3), v = unit_part_mod(b, 2, 3);
        auto eps = [](const Integer& x) { return int(((x - 1) / 2) % 2); };
        auto omega = [](const Integer& x) { return int(((x * x - 1) / 8) % 2); };
        int e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u);
        return (e % 2) ? -1 : 1;
    }
    Integer u = unit_part_mod(a, p, 1), v = unit_part_mod(b, p, 1);
    int sign = 1;
    if ((alpha % 2) && (beta % 2) && (p % 4 == 3)) sign = -sign;
    if (beta % 2 && legendre(u, p) == -1) sign = -sign;
    if (alpha % 2 && legendre(v, p) == -1) sign = -sign;
    return sign;
}

/// Does a*x^2 + b*y^2 + c*z^2 = 0 have a nontrivial zero over the completion?
inline bool ternary_form_isotropic(const Rational& a, const Rational& b, const Rational& c,
                                   const Place& place) {
    return hilbert_symbol(-a * c, -b * c, place) == 1;
}

/// Square root mod odd prime p (Tonelli-Shanks); requires (a/p) = 1.
inline Integer sqrt_mod_p(Integer a, const Integer& p) {
    a %= p;
    if (a < 0) a += p;
    if (a == 0) return 0;
    if (p % 4 == 3) return mod_pow(a, (p + 1) / 4, p);
    Integer q = p - 1;
    int s = 0;
    while ((q & 1) == 0) {
        q >>= 1;
        ++s;
    }
    Integer z = 2;
    while (jacobi(z, p) != -1) ++z;
    Integer m = s, c = mod_pow(z, q, p), t = mod_pow(a, q, p), r = mod_pow(a, (q + 1) / 2, p);
    while (t != 1) {
        Integer tt = t;
        int i = 0;
        while (tt != 1) {
            tt = tt * tt % p;
            ++i;
        }
        Integer b = c;
        for (Integer j = 0; j < m - i - 1; ++j) b = b * b % p;
        m = i;
        c = b * b % p;
        t = t * c % p;
        r = r * b % p;
    }
    return r;
}

/// y with y^2 = u mod p^k for a unit square u (p odd: QR; p = 2: u = 1 mod 8).
inline Integer sqrt_unit_mod_pk(const Integer& u, const Integer& p, unsigned k) {
    Integer pk = pow_int(p, k);
    if (p == 2) {
        // build the root bit by bit
        Integer y = 1;
        for (unsigned j = 3; j < k; ++j) {
            Integer mod = pow_int(2, j + 1);
            if ((y * y - u) % mod != 0) y += pow_int(2, j - 1);
        }
        return ((y % pk) + pk) % pk;
    }
    Integer y = sqrt_mod_p(u % p, p);
    Integer prec = p;
    while (prec < pk) {
        prec = prec * prec;  // Newton doubles precision
        Integer mod = prec < pk ? prec : pk;
        Integer inv = mod_pow(2 * y % mod, mod / p * (p - 1) - 1, mod);
        y = (y - (y * y - u) % mod * inv) % mod;
        if (y < 0) y += mod;
    }
    return y % pk;
}

}  // namespace sectobs
