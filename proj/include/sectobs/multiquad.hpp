#pragma once

#include "sectobs/factor.hpp"
#include "sectobs/integers.hpp"

#include <optional>
#include <set>
#include <vector>

namespace sectobs {

/// A basis of independent square classes of Q*, grown incrementally.
/// Every squarefree integer decomposes as r^2 * (product of a generator
/// subset) or is independent of the basis so far.
class SquareClassBasis {
public:
    size_t size() const { return gens_.size(); }
    const Integer& gen(size_t i) const { return gens_[i]; }

    /// d squarefree. Returns (mask, r) with d = r^2 * prod_{i in mask} gen(i)
    /// if d lies in the span, otherwise nullopt.
    std::optional<std::pair<unsigned, Rational>> decompose(const Integer& d) const {
        for (unsigned mask = 0; mask < (1u << gens_.size()); ++mask) {
            Rational q(d);
            for (size_t i = 0; i < gens_.size(); ++i)
                if (mask & (1u << i)) q /= Rational(gens_[i]);
            if (auto r = sqrt_exact(q)) return std::pair<unsigned, Rational>{mask, *r};
        }
        return std::nullopt;
    }

    std::pair<unsigned, Rational> decompose_or_insert(const Integer& d) {
        if (auto got = decompose(d)) return *got;
        gens_.push_back(d);
        return {1u << (gens_.size() - 1), Rational(1)};
    }

private:
    std::vector<Integer> gens_;
};

/// Element of Q(sqrt(g_1), ..., sqrt(g_k)) for an independent basis: 2^k
/// rational coordinates indexed by generator subsets. Independence makes
/// the algebra a genuine field, so rationality tests read off coordinates.
class MultiQuadElement {
public:
    MultiQuadElement(const SquareClassBasis* basis, std::vector<Rational> coords)
        : basis_(basis), c_(std::move(coords)) {
        c_.resize(size_t(1) << basis->size(), Rational(0));
    }
    static MultiQuadElement rational(const SquareClassBasis* basis, Rational v) {
        std::vector<Rational> c(size_t(1) << basis->size(), Rational(0));
        c[0] = std::move(v);
        return MultiQuadElement(basis, std::move(c));
    }
    /// r * sqrt(prod of generators in mask)
    static MultiQuadElement radical(const SquareClassBasis* basis, unsigned mask, Rational r) {
        std::vector<Rational> c(size_t(1) << basis->size(), Rational(0));
        c[mask] = std::move(r);
        return MultiQuadElement(basis, std::move(c));
    }

    const std::vector<Rational>& coords() const { return c_; }

    friend MultiQuadElement operator+(const MultiQuadElement& a, const MultiQuadElement& b) {
        std::vector<Rational> r(a.c_.size());
        for (size_t i = 0; i < r.size(); ++i) r[i] = a.c_[i] + b.c_[i];
        return MultiQuadElement(a.basis_, std::move(r));
    }
    friend MultiQuadElement operator-(const MultiQuadElement& a, const MultiQuadElement& b) {
        std::vector<Rational> r(a.c_.size());
        for (size_t i = 0; i < r.size(); ++i) r[i] = a.c_[i] - b.c_[i];
        return MultiQuadElement(a.basis_, std::move(r));
    }
    friend MultiQuadElement operator*(const MultiQuadElement& a, const MultiQuadElement& b) {
        std::vector<Rational> r(a.c_.size(), Rational(0));
        for (size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == 0) continue;
            for (size_t j = 0; j < b.c_.size(); ++j) {
                if (b.c_[j] == 0) continue;
                Rational v = a.c_[i] * b.c_[j];
                unsigned common = unsigned(i) & unsigned(j);
                for (size_t g = 0; g < a.basis_->size(); ++g)
                    if (common & (1u << g)) v *= Rational(a.basis_->gen(g));
                r[i ^ j] += v;
            }
        }
        return MultiQuadElement(a.basis_, std::move(r));
    }
    friend bool operator==(const MultiQuadElement& a, const MultiQuadElement& b) {
        return a.c_ == b.c_;
    }

    bool is_rational() const {
        for (size_t i = 1; i < c_.size(); ++i)
            if (c_[i] != 0) return false;
        return true;
    }

    std::set<unsigned> nonzero_masks() const {
        std::set<unsigned> out;
        for (size_t i = 1; i < c_.size(); ++i)
            if (c_[i] != 0) out.insert(unsigned(i));
        return out;
    }

    /// Conjugation in the quadratic subfield carried by `mask`: valid only
    /// for elements supported on {0, mask}.
    MultiQuadElement subfield_conj(unsigned mask) const {
        std::vector<Rational> r = c_;
        r[mask] = -r[mask];
        return MultiQuadElement(basis_, std::move(r));
    }

private:
    const SquareClassBasis* basis_;
    std::vector<Rational> c_;
};

}  // namespace sectobs
