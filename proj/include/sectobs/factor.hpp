#pragma once

#include "sectobs/integers.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace sectobs {

namespace detail {

inline const std::vector<uint32_t>& small_primes() {
    static const std::vector<uint32_t> primes = [] {
        constexpr uint32_t limit = 1'000'000;
        std::vector<bool> composite(limit + 1, false);
        std::vector<uint32_t> out;
        for (uint32_t i = 2; i <= limit; ++i) {
            if (composite[i]) continue;
            out.push_back(i);
            for (uint64_t j = uint64_t(i) * i; j <= limit; j += i) composite[j] = true;
        }
        return out;
    }();
    return primes;
}

inline bool miller_rabin_witness(const Integer& n, const Integer& a, const Integer& d, int s) {
    Integer x = mod_pow(a, d, n);
    if (x == 1 || x == n - 1) return false;
    for (int i = 1; i < s; ++i) {
        x = x * x % n;
        if (x == n - 1) return false;
    }
    return true;  // a witnesses compositeness
}

}  // namespace detail

/// Miller-Rabin with the 13-prime base set (deterministic below 3.3e24,
/// which covers everything this library factors after trial division),
/// plus a few fixed extra bases for larger inputs.
inline bool is_probable_prime(const Integer& n) {
    if (n < 2) return false;
    for (uint32_t p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u, 41u}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    Integer d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (uint32_t a : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u, 41u,
                       61u, 73u, 1662803u}) {
        if (Integer(a) % n == 0) continue;
        if (detail::miller_rabin_witness(n, a, d, s)) return false;
    }
    return true;
}

namespace detail {

/// Pollard rho (Floyd cycle detection, gcd batching). Input is odd,
/// composite, and free of factors below 10^6, so any divisor found is a
/// nontrivial split.
inline Integer pollard_rho(const Integer& n) {
    for (Integer c = 1;; ++c) {
        auto step = [&](const Integer& v) { return (v * v + c) % n; };
        Integer x = 2, y = 2, d = 1;
        while (d == 1) {
            Integer xs = x, ys = y, q = 1;
            for (int i = 0; i < 128 && d == 1; ++i) {
                x = step(x);
                y = step(step(y));
                if (x == y) {  // cycle closed without a split: new c
                    d = n;
                    break;
                }
                q = q * abs_int(x - y) % n;
            }
            if (d == 1) d = gcd_int(q, n);
            if (d == n) {
                // replay the batch one gcd at a time
                x = xs;
                y = ys;
                d = 1;
                for (int i = 0; i < 128 && d == 1; ++i) {
                    x = step(x);
                    y = step(step(y));
                    if (x == y) {
                        d = n;
                        break;
                    }
                    d = gcd_int(abs_int(x - y), n);
                }
                break;
            }
        }
        if (d != n && d != 1) return d;
    }
}

inline void factor_rec(Integer n, std::map<Integer, unsigned>& out) {
    if (n == 1) return;
    if (is_probable_prime(n)) {
        ++out[n];
        return;
    }
    Integer d = pollard_rho(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

}  // namespace detail

struct Factorization {
    int sign = 1;                                      // sign of the input
    std::vector<std::pair<Integer, unsigned>> primes;  // ascending

    Integer value() const {
        Integer v = sign;
        for (const auto& [p, e] : primes) v *= pow_int(p, e);
        return v;
    }
};

inline Factorization factor_integer(Integer n) {
    if (n == 0) throw std::domain_error("factor_integer: n must be nonzero");
    Factorization f;
    if (n < 0) {
        f.sign = -1;
        n = -n;
    }
    std::map<Integer, unsigned> acc;
    for (uint32_t p : detail::small_primes()) {
        if (Integer(p) * p > n) break;
        while (n % p == 0) {
            ++acc[p];
            n /= p;
        }
    }
    if (n > 1) {
        // cofactor has no prime below 10^6
        if (is_probable_prime(n)) {
            ++acc[n];
        } else {
            detail::factor_rec(n, acc);
        }
    }
    f.primes.assign(acc.begin(), acc.end());
    return f;
}

/// All positive divisors; only safe for the small inputs this library sees.
inline std::vector<Integer> divisors(const Integer& n) {
    Factorization f = factor_integer(n);
    std::vector<Integer> out{1};
    for (const auto& [p, e] : f.primes) {
        size_t base = out.size();
        Integer pk = 1;
        for (unsigned i = 1; i <= e; ++i) {
            pk *= p;
            for (size_t j = 0; j < base; ++j) out.push_back(out[j] * pk);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// n = s * r^2 with s squarefree (sign carried by s).
inline std::pair<Integer, Integer> squarefree_part(const Integer& n) {
    if (n == 0) throw std::domain_error("squarefree_part: n must be nonzero");
    Factorization f = factor_integer(n);
    Integer s = f.sign, r = 1;
    for (const auto& [p, e] : f.primes) {
        if (e & 1) s *= p;
        r *= pow_int(p, e / 2);
    }
    return {s, r};
}

/// q = s * r^2 with s a squarefree integer and r rational.
inline std::pair<Integer, Rational> squarefree_part(const Rational& q) {
    if (q == 0) throw std::domain_error("squarefree_part: q must be nonzero");
    // q = (num*den) / den^2
    auto [s, r] = squarefree_part(num(q) * den(q));
    return {s, Rational(r, den(q))};
}

inline std::set<Integer> prime_support(const Integer& n) {
    std::set<Integer> out;
    if (n == 0) return out;
    for (const auto& [p, e] : factor_integer(n).primes) out.insert(p);
    return out;
}

inline std::set<Integer> prime_support(const Rational& q) {
    std::set<Integer> out = prime_support(num(q));
    auto d = prime_support(den(q));
    out.insert(d.begin(), d.end());
    return out;
}

}  // namespace sectobs
