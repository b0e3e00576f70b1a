#pragma once

#include <optional>

#include "permadid/bls12/fields.hpp"

namespace permadid::bls12 {

/// Tower: Fp2 = Fp[u]/(u^2+1), Fp6 = Fp2[v]/(v^3 - xi) with xi = u+1,
/// Fp12 = Fp6[w]/(w^2 - v).

struct Fp2 {
    Fp c0, c1;

    static Fp2 zero() { return {Fp::zero(), Fp::zero()}; }
    static Fp2 one() { return {Fp::one(), Fp::zero()}; }
    /// The sextic non-residue xi = 1 + u used to define Fp6.
    static Fp2 xi() { return {Fp::one(), Fp::one()}; }

    bool is_zero() const { return c0.is_zero() && c1.is_zero(); }
    bool operator==(const Fp2& o) const { return c0 == o.c0 && c1 == o.c1; }
    bool operator!=(const Fp2& o) const { return !(*this == o); }

    Fp2 operator+(const Fp2& o) const { return {c0 + o.c0, c1 + o.c1}; }
    Fp2 operator-(const Fp2& o) const { return {c0 - o.c0, c1 - o.c1}; }
    Fp2 operator-() const { return {-c0, -c1}; }
    Fp2 operator*(const Fp2& o) const;
    Fp2& operator+=(const Fp2& o) { return *this = *this + o; }
    Fp2& operator-=(const Fp2& o) { return *this = *this - o; }
    Fp2& operator*=(const Fp2& o) { return *this = *this * o; }

    Fp2 square() const;
    Fp2 doubled() const { return {c0.doubled(), c1.doubled()}; }
    Fp2 mul_by_fp(const Fp& s) const { return {c0 * s, c1 * s}; }
    /// Multiplication by xi = 1+u: (c0 - c1) + (c0 + c1)u.
    Fp2 mul_by_xi() const { return {c0 - c1, c0 + c1}; }
    Fp2 conjugate() const { return {c0, -c1}; }
    /// p-power Frobenius; for Fp2 this is conjugation.
    Fp2 frobenius() const { return conjugate(); }
    Fp2 inverse() const;
    std::optional<Fp2> sqrt() const;

    /// Sign convention for compressed G2 points: compare (c1, c0)
    /// lexicographically against the negation.
    bool lexicographically_largest() const {
        if (!c1.is_zero()) return c1.lexicographically_largest();
        return c0.lexicographically_largest();
    }
};

struct Fp6 {
    Fp2 c0, c1, c2;

    static Fp6 zero() { return {Fp2::zero(), Fp2::zero(), Fp2::zero()}; }
    static Fp6 one() { return {Fp2::one(), Fp2::zero(), Fp2::zero()}; }

    bool is_zero() const { return c0.is_zero() && c1.is_zero() && c2.is_zero(); }
    bool operator==(const Fp6& o) const { return c0 == o.c0 && c1 == o.c1 && c2 == o.c2; }
    bool operator!=(const Fp6& o) const { return !(*this == o); }

    Fp6 operator+(const Fp6& o) const { return {c0 + o.c0, c1 + o.c1, c2 + o.c2}; }
    Fp6 operator-(const Fp6& o) const { return {c0 - o.c0, c1 - o.c1, c2 - o.c2}; }
    Fp6 operator-() const { return {-c0, -c1, -c2}; }
    Fp6 operator*(const Fp6& o) const;
    Fp6& operator*=(const Fp6& o) { return *this = *this * o; }

    Fp6 square() const { return *this * *this; }
    /// Multiplication by v: (xi*c2, c0, c1).
    Fp6 mul_by_v() const { return {c2.mul_by_xi(), c0, c1}; }
    Fp6 mul_by_fp2(const Fp2& s) const { return {c0 * s, c1 * s, c2 * s}; }
    Fp6 inverse() const;
    /// p-power Frobenius.
    Fp6 frobenius() const;
};

struct Fp12 {
    Fp6 c0, c1;

    static Fp12 zero() { return {Fp6::zero(), Fp6::zero()}; }
    static Fp12 one() { return {Fp6::one(), Fp6::zero()}; }

    bool is_zero() const { return c0.is_zero() && c1.is_zero(); }
    bool is_one() const { return *this == one(); }
    bool operator==(const Fp12& o) const { return c0 == o.c0 && c1 == o.c1; }
    bool operator!=(const Fp12& o) const { return !(*this == o); }

    Fp12 operator*(const Fp12& o) const;
    Fp12& operator*=(const Fp12& o) { return *this = *this * o; }

    Fp12 square() const;
    Fp12 conjugate() const { return {c0, -c1}; }
    Fp12 inverse() const;
    /// p-power Frobenius.
    Fp12 frobenius() const;

    /// Element with basis components 1, v, v*w — the shape produced by
    /// Miller-loop line evaluations.
    static Fp12 from_line(const Fp2& a, const Fp2& b, const Fp2& c) {
        return {Fp6{a, b, Fp2::zero()}, Fp6{Fp2::zero(), c, Fp2::zero()}};
    }
};

template <class F>
F pow_words(const F& base, const detail::u64* exp, size_t nwords) {
    while (nwords > 0 && exp[nwords - 1] == 0) --nwords;
    F acc = F::one();
    if (nwords == 0) return acc;
    size_t top = 63;
    while (top > 0 && !((exp[nwords - 1] >> top) & 1)) --top;
    for (size_t i = nwords; i-- > 0;) {
        for (size_t b = (i == nwords - 1 ? top + 1 : 64); b-- > 0;) {
            acc = acc.square();
            if ((exp[i] >> b) & 1) acc = acc * base;
        }
    }
    return acc;
}

template <class F>
F pow_words(const F& base, const std::vector<detail::u64>& exp) {
    return pow_words(base, exp.data(), exp.size());
}

}  // namespace permadid::bls12
