#pragma once

#include "sectobs/elliptic.hpp"
#include "sectobs/padic.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

namespace sectobs {

/// delta: E(Q)/2E(Q) -> (Q*/(Q*)^2)^2, P -> (x-e1, x-e2) as squarefree
/// integers, with the usual product substitution at the 2-torsion points.
inline std::pair<Integer, Integer> delta_image(const EllipticCurve& E, const EllipticPoint& p) {
    if (p.infinity) return {1, 1};
    auto sq = [](const Rational& q) { return squarefree_part(q).first; };
    Rational x = p.x;
    Rational d1 = x - Rational(E.e[0]), d2 = x - Rational(E.e[1]);
    if (d1 == 0) return {sq(Rational((E.e[0] - E.e[1]) * (E.e[0] - E.e[2]))), sq(d2)};
    if (d2 == 0) return {sq(d1), sq(Rational((E.e[1] - E.e[0]) * (E.e[1] - E.e[2])))};
    return {sq(d1), sq(d2)};
}

namespace detail {

/// Local solvability of b1 z1^2 - b2 z2^2 = A w^2, b1 z1^2 - b1 b2 z3^2 =
/// B w^2 over Q_p by projective residue refinement with multivariate
/// Hensel acceptance. The depth cap comes from the discriminant data, so
/// exceeding it is a defect, never an answer.
class QuadricPairSearch {
public:
    QuadricPairSearch(const Integer& b1, const Integer& b2, const Integer& A, const Integer& B,
                      const Integer& p)
        : p_(p), pl_(long(p)) {
        fc_ = {-A, b1, -b2, Integer(0)};
        gc_ = {-B, b1, Integer(0), -b1 * b2};
        unsigned m0 = unsigned(valuation(2 * b1 * b2 * A * B * (B - A), p));
        unsigned minor_cap =
            unsigned(valuation(4 * b1 * b1 * b2 * b2 * A * B * (B - A), p)) + 2 * (m0 + 1);
        depth_cap_ = 2 * minor_cap + 3;
    }

    bool solvable() {
        for (int chart = 0; chart < 4; ++chart)
            if (level_one_scan(chart)) return true;
        return false;
    }

private:
    Integer p_;
    long pl_;
    std::array<Integer, 4> fc_, gc_;
    unsigned depth_cap_ = 0;

    static Integer eval(const std::array<Integer, 4>& coeffs, const std::array<Integer, 4>& c) {
        Integer r = 0;
        for (int i = 0; i < 4; ++i) r += coeffs[size_t(i)] * c[size_t(i)] * c[size_t(i)];
        return r;
    }

    /// Variables left of the chart variable are covered by earlier charts
    /// when they are units, so they range over p*Z_p only; a cheap mod-p
    /// sweep in machine integers picks the level-1 residues worth refining.
    bool level_one_scan(int chart) {
        std::array<long, 4> fr{}, gr{};
        for (int i = 0; i < 4; ++i) {
            fr[size_t(i)] = long(((fc_[size_t(i)] % p_) + p_) % p_);
            gr[size_t(i)] = long(((gc_[size_t(i)] % p_) + p_) % p_);
        }
        std::vector<int> free_vars;
        for (int v = 0; v < 4; ++v)
            if (v != chart) free_vars.push_back(v);
        std::array<long, 4> c{};
        c[size_t(chart)] = 1;
        std::array<long, 3> limit{};
        for (size_t i = 0; i < 3; ++i) limit[i] = free_vars[i] < chart ? 1 : pl_;
        for (long t0 = 0; t0 < limit[0]; ++t0)
            for (long t1 = 0; t1 < limit[1]; ++t1)
                for (long t2 = 0; t2 < limit[2]; ++t2) {
                    c[size_t(free_vars[0])] = t0;
                    c[size_t(free_vars[1])] = t1;
                    c[size_t(free_vars[2])] = t2;
                    long f = 0, g = 0;
                    for (int i = 0; i < 4; ++i) {
                        long sq = c[size_t(i)] * c[size_t(i)] % pl_;
                        f = (f + fr[size_t(i)] * sq) % pl_;
                        g = (g + gr[size_t(i)] * sq) % pl_;
                    }
                    if (f != 0 || g != 0) continue;
                    std::array<Integer, 4> exact{};
                    for (int i = 0; i < 4; ++i) exact[size_t(i)] = c[size_t(i)];
                    if (node(exact, free_vars, 1)) return true;
                }
        return false;
    }

    bool hensel_accept(const std::array<Integer, 4>& c, const std::vector<int>& free_vars,
                       const Integer& f, const Integer& g) const {
        if (f == 0 && g == 0) return true;  // exact projective point
        for (size_t a = 0; a < free_vars.size(); ++a)
            for (size_t b = a + 1; b < free_vars.size(); ++b) {
                int i = free_vars[a], j = free_vars[b];
                Integer minor = 4 * (fc_[size_t(i)] * c[size_t(i)] * gc_[size_t(j)] * c[size_t(j)] -
                                     fc_[size_t(j)] * c[size_t(j)] * gc_[size_t(i)] * c[size_t(i)]);
                if (minor == 0) continue;
                int m = valuation(minor, p_);
                bool f_ok = f == 0 || valuation(f, p_) > 2 * m;
                bool g_ok = g == 0 || valuation(g, p_) > 2 * m;
                if (f_ok && g_ok) return true;
            }
        return false;
    }

    bool node(const std::array<Integer, 4>& c, const std::vector<int>& free_vars, unsigned k) {
        Integer pk = pow_int(p_, k);
        Integer f = eval(fc_, c), g = eval(gc_, c);
        if (f % pk != 0 || g % pk != 0) return false;
        if (hensel_accept(c, free_vars, f, g)) return true;
        if (k >= depth_cap_)
            throw internal_defect("quadric pair search: completeness bound exceeded");

        // digits t with f, g = 0 mod p^(k+1): two linear congruences mod p
        std::array<std::array<long, 4>, 2> sys{};
        for (int row = 0; row < 2; ++row) {
            const auto& coeffs = row == 0 ? fc_ : gc_;
            const Integer& value = row == 0 ? f : g;
            for (size_t i = 0; i < 3; ++i) {
                Integer gcomp = 2 * coeffs[size_t(free_vars[i])] * c[size_t(free_vars[i])] % p_;
                if (gcomp < 0) gcomp += p_;
                sys[size_t(row)][i] = long(gcomp);
            }
            Integer digit = (value / pk) % p_;
            if (digit < 0) digit += p_;
            sys[size_t(row)][3] = (pl_ - long(digit)) % pl_;
        }
        std::vector<int> pivot_col;
        int rank = 0;
        for (int col = 0; col < 3 && rank < 2; ++col) {
            int pr = -1;
            for (int row = rank; row < 2; ++row)
                if (sys[size_t(row)][size_t(col)] != 0) {
                    pr = row;
                    break;
                }
            if (pr < 0) continue;
            std::swap(sys[size_t(rank)], sys[size_t(pr)]);
            long inv = long(mod_pow(Integer(sys[size_t(rank)][size_t(col)]), p_ - 2, p_));
            for (int j = 0; j < 4; ++j)
                sys[size_t(rank)][size_t(j)] = sys[size_t(rank)][size_t(j)] * inv % pl_;
            for (int row = 0; row < 2; ++row) {
                if (row == rank) continue;
                long fac = sys[size_t(row)][size_t(col)];
                if (fac == 0) continue;
                for (int j = 0; j < 4; ++j)
                    sys[size_t(row)][size_t(j)] =
                        ((sys[size_t(row)][size_t(j)] - fac * sys[size_t(rank)][size_t(j)]) % pl_ + pl_) % pl_;
            }
            pivot_col.push_back(col);
            ++rank;
        }
        for (int row = rank; row < 2; ++row)
            if (sys[size_t(row)][3] != 0) return false;  // inconsistent: prune
        std::vector<int> free_cols;
        for (int col = 0; col < 3; ++col)
            if (std::find(pivot_col.begin(), pivot_col.end(), col) == pivot_col.end())
                free_cols.push_back(col);
        size_t count = 1;
        for (size_t i = 0; i < free_cols.size(); ++i) count *= size_t(pl_);
        for (size_t idx = 0; idx < count; ++idx) {
            std::array<long, 3> t{};
            size_t rest = idx;
            for (int fcol : free_cols) {
                t[size_t(fcol)] = long(rest % size_t(pl_));
                rest /= size_t(pl_);
            }
            for (int row = 0; row < rank; ++row) {
                long acc = sys[size_t(row)][3];
                for (int fcol : free_cols)
                    acc = ((acc - sys[size_t(row)][size_t(fcol)] * t[size_t(fcol)]) % pl_ + pl_) % pl_;
                t[size_t(pivot_col[size_t(row)])] = acc;
            }
            std::array<Integer, 4> child = c;
            for (size_t i = 0; i < 3; ++i)
                child[size_t(free_vars[i])] = c[size_t(free_vars[i])] + pk * Integer(t[i]);
            if (node(child, free_vars, k + 1)) return true;
        }
        return false;
    }
};

inline bool quadric_pair_solvable_Qp(const Integer& b1, const Integer& b2, const Integer& A,
                                     const Integer& B, const Integer& p) {
    return QuadricPairSearch(b1, b2, A, B, p).solvable();
}

/// Real solvability: an admissible value t = b1 z1^2 on three closed rays,
/// or the w = 0 locus (which needs b1, b2 > 0).
inline bool quadric_pair_solvable_R(const Integer& b1, const Integer& b2, const Integer& A,
                                    const Integer& B) {
    if (b1 > 0 && b2 > 0) return true;
    Rational lower = 0, upper = 0;
    bool has_lower = false, has_upper = false;
    auto clamp = [&](const Integer& b, const Rational& base) {
        if (b > 0) {
            if (!has_lower || base > lower) lower = base;
            has_lower = true;
        } else {
            if (!has_upper || base < upper) upper = base;
            has_upper = true;
        }
    };
    clamp(b1, 0);
    clamp(b2, Rational(A));
    clamp(b1 * b2, Rational(B));
    if (has_lower && has_upper) return lower <= upper;
    return true;
}

struct SquareClassCoder {
    std::vector<Integer> gens;  // gens[0] = -1, then primes ascending

    explicit SquareClassCoder(const std::set<Integer>& primes) {
        gens.push_back(-1);
        gens.insert(gens.end(), primes.begin(), primes.end());
    }
    unsigned mask_of(const Integer& squarefree) const {
        unsigned m = 0;
        Integer rest = squarefree;
        if (rest < 0) {
            m |= 1;
            rest = -rest;
        }
        for (size_t i = 1; i < gens.size(); ++i)
            while (rest % gens[i] == 0) {
                rest /= gens[i];
                m ^= 1u << i;
            }
        if (rest != 1) throw internal_defect("square class outside the descent support");
        return m;
    }
    Integer value_of(unsigned mask) const {
        Integer v = 1;
        for (size_t i = 0; i < gens.size(); ++i)
            if (mask & (1u << i)) v *= gens[i];
        return v;
    }
};

/// Hilbert symbols at one place, evaluated on masks by bilinearity.
struct HilbertTable {
    std::vector<unsigned> rows;  // bit j of rows[i]: (g_i, g_j) = -1

    HilbertTable(const SquareClassCoder& coder, const Place& place) {
        rows.resize(coder.gens.size());
        for (size_t i = 0; i < coder.gens.size(); ++i)
            for (size_t j = 0; j < coder.gens.size(); ++j)
                if (hilbert_symbol(Rational(coder.gens[i]), Rational(coder.gens[j]), place) == -1)
                    rows[i] |= 1u << j;
    }
    int sym(unsigned a, unsigned b) const {
        int parity = 0;
        for (size_t i = 0; i < rows.size(); ++i)
            if (a & (1u << i)) parity ^= __builtin_parity(rows[i] & b);
        return parity ? -1 : 1;
    }
    /// diag(a, b, c) isotropic over Q_p: (a,b)(a,c)(b,c) = (-1, -abc).
    bool isotropic(unsigned a, unsigned b, unsigned c) const {
        int eps = sym(a, b) * sym(a, c) * sym(b, c);
        return eps == sym(1u, (a ^ b ^ c) ^ 1u);
    }
};

/// F_2 xor basis with pivoting on the highest set bit.
class F2Basis {
public:
    bool insert(unsigned v) {
        while (v) {
            int hb = 31 - __builtin_clz(v);
            if (size_t(hb) >= pivots_.size()) pivots_.resize(size_t(hb) + 1, 0);
            if (!pivots_[size_t(hb)]) {
                pivots_[size_t(hb)] = v;
                ++dim_;
                return true;
            }
            v ^= pivots_[size_t(hb)];
        }
        return false;
    }
    int dim() const { return dim_; }

private:
    std::vector<unsigned> pivots_;
    int dim_ = 0;
};

}  // namespace detail

struct DescentResult {
    std::array<Integer, 3> e{};
    std::vector<std::pair<Integer, Integer>> selmer;         // sorted, includes (1,1)
    std::vector<std::pair<Integer, Integer>> torsion_image;  // deduplicated, sorted
    std::vector<EllipticPoint> generators;                   // saturated non-torsion points
    std::vector<std::pair<Integer, Integer>> generator_images;
    int selmer_dim = 0;
    int rank_lower = 0;
    int rank_upper = 0;
    std::optional<int> certified_rank;
    std::optional<int> sha2_dim;
    long height_bound = 0;
};

/// Full 2-descent on an integral split model: the Selmer group collects the
/// (b1, b2) pairs whose homogeneous space is solvable over R and every
/// relevant Q_p. Bilinear Hilbert tables prune candidates cheaply before
/// the complete quadric search runs on the survivors.
inline DescentResult two_descent(const EllipticCurve& E) {
    DescentResult out;
    out.e = E.e;
    Integer A = E.e[1] - E.e[0], B = E.e[2] - E.e[0];
    Integer diffs = 2 * (E.e[0] - E.e[1]) * (E.e[0] - E.e[2]) * (E.e[1] - E.e[2]);
    detail::SquareClassCoder coder(prime_support(diffs));
    size_t G = coder.gens.size();
    if (G > 14) throw internal_defect("two_descent: support set too large");

    std::vector<Place> places;
    for (size_t i = 1; i < G; ++i) places.push_back(Place::prime(coder.gens[i]));
    std::vector<detail::HilbertTable> tables;
    tables.reserve(places.size());
    for (const auto& pl : places) tables.emplace_back(coder, pl);

    unsigned mA = coder.mask_of(squarefree_part(A).first);
    unsigned mB = coder.mask_of(squarefree_part(B).first);
    unsigned mBA = coder.mask_of(squarefree_part(B - A).first);

    std::vector<Integer> values(size_t(1) << G);
    for (unsigned m = 0; m < values.size(); ++m) values[m] = coder.value_of(m);

    const unsigned sign_bit = 1u;
    for (unsigned m1 = 0; m1 < (1u << G); ++m1) {
        for (unsigned m2 = 0; m2 < (1u << G); ++m2) {
            const Integer& b1 = values[m1];
            const Integer& b2 = values[m2];
            if (!detail::quadric_pair_solvable_R(b1, b2, A, B)) continue;
            bool ok = true;
            for (size_t t = 0; t < tables.size() && ok; ++t) {
                const auto& tab = tables[t];
                ok = tab.isotropic(m1, m2 ^ sign_bit, mA ^ sign_bit) &&
                     tab.isotropic(m1, (m1 ^ m2) ^ sign_bit, mB ^ sign_bit) &&
                     tab.isotropic(m2, (m1 ^ m2) ^ sign_bit, mBA ^ sign_bit);
            }
            if (!ok) continue;
            for (size_t t = 0; t < places.size() && ok; ++t)
                if (!detail::quadric_pair_solvable_Qp(b1, b2, A, B, places[t].p())) ok = false;
            if (ok) out.selmer.emplace_back(b1, b2);
        }
    }
    std::sort(out.selmer.begin(), out.selmer.end());

    size_t size = out.selmer.size();
    int dim = 0;
    while ((size_t(1) << dim) < size) ++dim;
    if ((size_t(1) << dim) != size)
        throw internal_defect("two_descent: Selmer size is not a power of 2");
    out.selmer_dim = dim;
    out.rank_upper = dim - 2;

    std::set<std::pair<Integer, Integer>> tors;
    tors.insert(delta_image(E, EllipticPoint::at_infinity()));
    for (const auto& t : two_torsion_points(E)) {
        auto img = delta_image(E, t);
        if (!std::binary_search(out.selmer.begin(), out.selmer.end(), img))
            throw internal_defect("two_descent: torsion image escapes the Selmer group");
        tors.insert(img);
    }
    out.torsion_image.assign(tors.begin(), tors.end());
    return out;
}

namespace detail {

inline Integer int128_to_integer(__int128_t v) {
    bool neg = v < 0;
    if (neg) v = -v;
    Integer hi = Integer(uint64_t(uint64_t(__uint128_t(v) >> 64)));
    Integer out = (hi << 64) + Integer(uint64_t(__uint128_t(v) & ~uint64_t(0)));
    return neg ? -out : out;
}

inline const std::vector<char>& square_residue_table(long mod) {
    auto make = [](long m) {
        std::vector<char> t(size_t(m), 0);
        for (long r = 0; r < m; ++r) t[size_t(r * r % m)] = 1;
        return t;
    };
    static const std::vector<char> t63 = make(63), t65 = make(65), t11 = make(11);
    switch (mod) {
        case 63: return t63;
        case 65: return t65;
        default: return t11;
    }
}

}  // namespace detail

/// All points with x = m/n^2, |m| <= H, n^2 <= H in lowest terms: rolling
/// finite differences of the cubic along m, residue filters, then an exact
/// square test. Points come back with y >= 0, ordered by (n, m).
inline std::vector<EllipticPoint> point_search(const EllipticCurve& E, long height_bound) {
    std::vector<EllipticPoint> out;
    using i128 = __int128_t;
    Integer emax = 0;
    for (const auto& e : E.e) emax = std::max(emax, abs_int(e));
    Integer extreme = pow_int(Integer(height_bound) * (emax + 1) * 2, 3);
    if (extreme >= (Integer(1) << 126))
        throw input_error("point_search: height bound too large for these coefficients");

    static const uint64_t squares_mod64 = [] {
        uint64_t m = 0;
        for (uint64_t r = 0; r < 64; ++r) m |= uint64_t(1) << (r * r % 64);
        return m;
    }();
    auto residues_ok = [](i128 v) {
        for (long mod : {63L, 65L, 11L}) {
            long rem = long(v % mod);
            if (!detail::square_residue_table(mod)[size_t(rem)]) return false;
        }
        return true;
    };
    auto exact_sqrt = [](i128 v) -> std::optional<i128> {
        i128 r = i128(sqrtl((long double)v));
        while (r > 0 && r * r > v) --r;
        while ((r + 1) * (r + 1) <= v) ++r;
        if (r * r == v) return r;
        return std::nullopt;
    };

    const long H = height_bound;
    const long e0 = long(E.e[0]), e1 = long(E.e[1]), e2 = long(E.e[2]);
    for (long n = 1; i128(n) * n <= H; ++n) {
        i128 N = i128(n) * n;
        i128 a0 = i128(e0) * N, a1 = i128(e1) * N, a2 = i128(e2) * N;
        auto P = [&](i128 m) { return (m - a0) * (m - a1) * (m - a2); };
        i128 m = -H;
        i128 p0 = P(m), p1 = P(m + 1), p2 = P(m + 2), p3 = P(m + 3);
        i128 d1 = p1 - p0, d2 = p2 - 2 * p1 + p0;
        const i128 d3 = p3 - 3 * p2 + 3 * p1 - p0;
        for (; m <= H; ++m) {
            i128 v = p0;
            if (v >= 0 && (squares_mod64 & (uint64_t(1) << (uint64_t(v) & 63))) && residues_ok(v)) {
                if (auto root = exact_sqrt(v)) {
                    long mv = long(m);
                    if (std::gcd(mv < 0 ? -mv : mv, n) == 1) {
                        Integer n2 = Integer(n) * Integer(n);
                        out.push_back(EllipticPoint::affine(
                            Rational(Integer(mv), n2),
                            Rational(detail::int128_to_integer(*root), n2 * Integer(n))));
                    }
                }
            }
            p0 += d1;
            d1 += d2;
            d2 += d3;
        }
    }
    return out;
}

/// Rank certification: Selmer upper bound against the F_2 span of delta
/// images of 2-saturated search points. Equality certifies the rank and
/// pins Sha[2] = 0; otherwise the result stays uncertified.
inline DescentResult certify_rank(const EllipticCurve& E, long height_bound = 10000) {
    DescentResult out = two_descent(E);
    out.height_bound = height_bound;

    Integer diffs = 2 * (E.e[0] - E.e[1]) * (E.e[0] - E.e[2]) * (E.e[1] - E.e[2]);
    detail::SquareClassCoder coder(prime_support(diffs));
    auto pack = [&](const std::pair<Integer, Integer>& im) {
        return (coder.mask_of(im.first) << 16) | coder.mask_of(im.second);
    };
    detail::F2Basis basis;
    for (const auto& im : out.torsion_image) basis.insert(pack(im));

    for (const auto& p : point_search(E, height_bound)) {
        if (torsion_order(E, p)) continue;
        EllipticPoint sat = saturate_at_two(E, p);
        auto img = delta_image(E, sat);
        if (!std::binary_search(out.selmer.begin(), out.selmer.end(), img))
            throw internal_defect("certify_rank: point image escapes the Selmer group");
        if (basis.insert(pack(img))) {
            out.generators.push_back(sat);
            out.generator_images.push_back(img);
            ++out.rank_lower;
        }
    }
    if (out.rank_lower > out.rank_upper)
        throw internal_defect("certify_rank: lower bound exceeds upper bound");
    if (out.rank_lower == out.rank_upper) {
        out.certified_rank = out.rank_lower;
        out.sha2_dim = out.selmer_dim - 2 - out.rank_upper;
    }
    return out;
}

struct JacobianRank {
    std::optional<int> rank;
    std::string provenance;
};

/// rank J = rank E1 + rank E2: J is isogenous over Q to E1 x E2 and rank is
/// an isogeny invariant.
inline JacobianRank jacobian_rank(const DescentResult& q1, const DescentResult& q2) {
    JacobianRank out;
    if (q1.certified_rank && q2.certified_rank) {
        out.rank = *q1.certified_rank + *q2.certified_rank;
        out.provenance =
            "rank(J) = rank(E1) + rank(E2); both quotient ranks certified by 2-descent";
    } else {
        out.provenance = "inconclusive: a quotient rank is not certified";
    }
    return out;
}

}  // namespace sectobs
