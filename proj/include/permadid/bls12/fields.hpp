#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "permadid/bytes.hpp"
#include "permadid/crypto.hpp"

namespace permadid::bls12 {

namespace detail {

using u64 = uint64_t;
using u128 = unsigned __int128;

template <size_t N>
using Limbs = std::array<u64, N>;  // little-endian

template <size_t N>
inline bool limbs_is_zero(const Limbs<N>& a) {
    u64 acc = 0;
    for (u64 w : a) acc |= w;
    return acc == 0;
}

template <size_t N>
inline int limbs_cmp(const Limbs<N>& a, const Limbs<N>& b) {
    for (size_t i = N; i-- > 0;) {
        if (a[i] < b[i]) return -1;
        if (a[i] > b[i]) return 1;
    }
    return 0;
}

template <size_t N>
inline u64 limbs_add(const Limbs<N>& a, const Limbs<N>& b, Limbs<N>& out) {
    u128 carry = 0;
    for (size_t i = 0; i < N; ++i) {
        carry += (u128)a[i] + b[i];
        out[i] = (u64)carry;
        carry >>= 64;
    }
    return (u64)carry;
}

template <size_t N>
inline u64 limbs_sub(const Limbs<N>& a, const Limbs<N>& b, Limbs<N>& out) {
    u64 borrow = 0;
    for (size_t i = 0; i < N; ++i) {
        u64 bi = b[i];
        u64 t = a[i] - bi;
        u64 b1 = t > a[i];
        u64 t2 = t - borrow;
        u64 b2 = t2 > t;
        out[i] = t2;
        borrow = b1 | b2;
    }
    return borrow;
}

/// Montgomery product: out = a * b * 2^(-64N) mod p. Inputs reduced, output reduced.
template <size_t N>
inline void mont_mul(const Limbs<N>& a, const Limbs<N>& b, const Limbs<N>& p, u64 inv, Limbs<N>& out) {
    u64 t[2 * N + 1] = {0};
    for (size_t i = 0; i < N; ++i) {
        u128 carry = 0;
        for (size_t j = 0; j < N; ++j) {
            carry += (u128)a[i] * b[j] + t[i + j];
            t[i + j] = (u64)carry;
            carry >>= 64;
        }
        t[i + N] = (u64)carry;
    }
    for (size_t i = 0; i < N; ++i) {
        u64 m = t[i] * inv;
        u128 carry = 0;
        for (size_t j = 0; j < N; ++j) {
            carry += (u128)m * p[j] + t[i + j];
            t[i + j] = (u64)carry;
            carry >>= 64;
        }
        size_t k = i + N;
        while (carry != 0) {
            carry += t[k];
            t[k] = (u64)carry;
            carry >>= 64;
            ++k;
        }
    }
    Limbs<N> r;
    for (size_t i = 0; i < N; ++i) r[i] = t[N + i];
    // result < 2p and 2p < 2^(64N) for both moduli used here
    if (t[2 * N] != 0 || limbs_cmp(r, p) >= 0) limbs_sub(r, p, r);
    out = r;
}

/// Setup-time variable-width unsigned integer (little-endian words).
/// Used only to derive field constants and exponents from the modulus.
struct VarUint {
    std::vector<u64> w;

    static VarUint from_u64(u64 v);
    static VarUint from_hex(std::string_view hex);
    static VarUint pow2(size_t bit);

    void trim();
    bool is_zero() const;
    size_t bit_length() const;
    bool bit(size_t i) const;

    static int cmp(const VarUint& a, const VarUint& b);
    static VarUint add(const VarUint& a, const VarUint& b);
    static VarUint sub(const VarUint& a, const VarUint& b);  // requires a >= b
    static VarUint mul(const VarUint& a, const VarUint& b);
    static void divmod(const VarUint& a, const VarUint& b, VarUint& q, VarUint& r);
    static VarUint div_u64(const VarUint& a, u64 d);

    std::vector<u64> words_msb_trimmed() const;

    template <size_t N>
    Limbs<N> to_limbs() const {
        Limbs<N> out{};
        for (size_t i = 0; i < N && i < w.size(); ++i) out[i] = w[i];
        return out;
    }
};

}  // namespace detail

struct FpTag {
    static constexpr size_t N = 6;
    static const char* modulus_hex();
};

struct FrTag {
    static constexpr size_t N = 4;
    static const char* modulus_hex();
};

template <class Tag>
struct MontParams {
    detail::Limbs<Tag::N> modulus{};
    detail::Limbs<Tag::N> r1{};            // 2^(64N) mod p — Montgomery one
    detail::Limbs<Tag::N> r2{};            // 2^(128N) mod p
    detail::Limbs<Tag::N> half_modulus{};  // (p-1)/2, canonical domain
    detail::u64 inv = 0;                   // -p^(-1) mod 2^64
    std::vector<detail::u64> exp_inverse;  // p-2
    std::vector<detail::u64> exp_sqrt;     // (p+1)/4 (meaningful when p = 3 mod 4)
};

template <class Tag>
const MontParams<Tag>& mont_params();

/// Prime-field element in Montgomery form. Fp is the 381-bit base field of
/// BLS12-381, Fr the 255-bit scalar field (the pairing group order).
template <class Tag>
class MontFe {
public:
    static constexpr size_t N = Tag::N;
    static constexpr size_t kBytes = N * 8;

    MontFe() : v_{} {}

    static MontFe zero() { return MontFe(); }
    static MontFe one();
    static MontFe from_u64(uint64_t v);
    static MontFe from_hex(std::string_view hex);  // reduced mod p

    /// Strict decode of a canonical big-endian value; rejects >= modulus.
    static std::optional<MontFe> from_bytes(const uint8_t* data);
    static std::optional<MontFe> from_bytes(const Bytes& data);

    /// Arbitrary-length big-endian bytes reduced mod p.
    static MontFe from_bytes_reduced(const uint8_t* data, size_t len);
    static MontFe from_bytes_reduced(const Bytes& data);

    void to_bytes(uint8_t out[kBytes]) const;
    Bytes to_bytes() const;

    MontFe operator+(const MontFe& o) const;
    MontFe operator-(const MontFe& o) const;
    MontFe operator*(const MontFe& o) const;
    MontFe& operator+=(const MontFe& o) { return *this = *this + o; }
    MontFe& operator-=(const MontFe& o) { return *this = *this - o; }
    MontFe& operator*=(const MontFe& o) { return *this = *this * o; }
    MontFe operator-() const;

    MontFe square() const { return *this * *this; }
    MontFe doubled() const { return *this + *this; }

    MontFe pow(const detail::u64* exp, size_t nwords) const;
    MontFe pow(const std::vector<detail::u64>& exp) const { return pow(exp.data(), exp.size()); }

    /// Multiplicative inverse via Fermat; inverse of zero is zero.
    MontFe inverse() const;

    /// Square root for p = 3 mod 4 moduli; nullopt when no root exists.
    std::optional<MontFe> sqrt() const;

    bool is_zero() const { return detail::limbs_is_zero(v_); }
    bool operator==(const MontFe& o) const { return v_ == o.v_; }
    bool operator!=(const MontFe& o) const { return !(*this == o); }

    /// True when the canonical integer form exceeds (p-1)/2.
    bool lexicographically_largest() const;

    const detail::Limbs<N>& raw() const { return v_; }

private:
    detail::Limbs<N> v_;
};

using Fp = MontFe<FpTag>;
using Fr = MontFe<FrTag>;

extern template class MontFe<FpTag>;
extern template class MontFe<FrTag>;

/// Uniform scalar: 48 bytes from the rng reduced mod r.
Fr random_fr(crypto::Rng& rng);

/// Uniform nonzero scalar.
Fr random_nonzero_fr(crypto::Rng& rng);

}  // namespace permadid::bls12
