#include "permadid/bls12/fields.hpp"

#include <cassert>
#include <stdexcept>

#include "permadid/errors.hpp"

namespace permadid::bls12 {

namespace detail {

VarUint VarUint::from_u64(u64 v) {
    VarUint out;
    out.w.push_back(v);
    out.trim();
    return out;
}

VarUint VarUint::from_hex(std::string_view hex) {
    if (hex.substr(0, 2) == "0x") hex.remove_prefix(2);
    VarUint out;
    out.w.assign((hex.size() * 4 + 63) / 64 + 1, 0);
    for (char c : hex) {
        u64 nib;
        if (c >= '0' && c <= '9') nib = u64(c - '0');
        else if (c >= 'a' && c <= 'f') nib = u64(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F') nib = u64(c - 'A' + 10);
        else throw Error(Errc::Internal, "bad hex digit in field constant");
        // shift left 4 and add nibble
        u64 carry = nib;
        for (auto& word : out.w) {
            u64 hi = word >> 60;
            word = (word << 4) | carry;
            carry = hi;
        }
    }
    out.trim();
    return out;
}

VarUint VarUint::pow2(size_t bit) {
    VarUint out;
    out.w.assign(bit / 64 + 1, 0);
    out.w[bit / 64] = u64(1) << (bit % 64);
    return out;
}

void VarUint::trim() {
    while (w.size() > 1 && w.back() == 0) w.pop_back();
    if (w.empty()) w.push_back(0);
}

bool VarUint::is_zero() const {
    for (u64 v : w)
        if (v) return false;
    return true;
}

size_t VarUint::bit_length() const {
    for (size_t i = w.size(); i-- > 0;) {
        if (w[i] != 0) {
            size_t bits = 0;
            u64 v = w[i];
            while (v) {
                ++bits;
                v >>= 1;
            }
            return i * 64 + bits;
        }
    }
    return 0;
}

bool VarUint::bit(size_t i) const {
    size_t word = i / 64;
    if (word >= w.size()) return false;
    return (w[word] >> (i % 64)) & 1;
}

int VarUint::cmp(const VarUint& a, const VarUint& b) {
    size_t n = std::max(a.w.size(), b.w.size());
    for (size_t i = n; i-- > 0;) {
        u64 av = i < a.w.size() ? a.w[i] : 0;
        u64 bv = i < b.w.size() ? b.w[i] : 0;
        if (av < bv) return -1;
        if (av > bv) return 1;
    }
    return 0;
}

VarUint VarUint::add(const VarUint& a, const VarUint& b) {
    VarUint out;
    size_t n = std::max(a.w.size(), b.w.size());
    out.w.assign(n + 1, 0);
    u128 carry = 0;
    for (size_t i = 0; i < n; ++i) {
        carry += (u128)(i < a.w.size() ? a.w[i] : 0) + (i < b.w.size() ? b.w[i] : 0);
        out.w[i] = (u64)carry;
        carry >>= 64;
    }
    out.w[n] = (u64)carry;
    out.trim();
    return out;
}

VarUint VarUint::sub(const VarUint& a, const VarUint& b) {
    assert(cmp(a, b) >= 0);
    VarUint out;
    out.w.assign(a.w.size(), 0);
    u64 borrow = 0;
    for (size_t i = 0; i < a.w.size(); ++i) {
        u64 bv = i < b.w.size() ? b.w[i] : 0;
        u64 t = a.w[i] - bv;
        u64 b1 = t > a.w[i];
        u64 t2 = t - borrow;
        u64 b2 = t2 > t;
        out.w[i] = t2;
        borrow = b1 | b2;
    }
    out.trim();
    return out;
}

VarUint VarUint::mul(const VarUint& a, const VarUint& b) {
    VarUint out;
    out.w.assign(a.w.size() + b.w.size(), 0);
    for (size_t i = 0; i < a.w.size(); ++i) {
        u128 carry = 0;
        for (size_t j = 0; j < b.w.size(); ++j) {
            carry += (u128)a.w[i] * b.w[j] + out.w[i + j];
            out.w[i + j] = (u64)carry;
            carry >>= 64;
        }
        out.w[i + b.w.size()] = (u64)carry;
    }
    out.trim();
    return out;
}

void VarUint::divmod(const VarUint& a, const VarUint& b, VarUint& q, VarUint& r) {
    if (b.is_zero()) throw Error(Errc::Internal, "division by zero in field setup");
    q.w.assign(a.w.size(), 0);
    r = VarUint::from_u64(0);
    for (size_t i = a.bit_length(); i-- > 0;) {
        // r = r*2 + bit
        u64 carry = a.bit(i) ? 1u : 0u;
        for (auto& word : r.w) {
            u64 hi = word >> 63;
            word = (word << 1) | carry;
            carry = hi;
        }
        if (carry) r.w.push_back(carry);
        if (cmp(r, b) >= 0) {
            r = sub(r, b);
            q.w[i / 64] |= u64(1) << (i % 64);
        }
    }
    q.trim();
    r.trim();
}

VarUint VarUint::div_u64(const VarUint& a, u64 d) {
    VarUint q, r, dv = from_u64(d);
    divmod(a, dv, q, r);
    return q;
}

std::vector<u64> VarUint::words_msb_trimmed() const {
    std::vector<u64> out = w;
    while (out.size() > 1 && out.back() == 0) out.pop_back();
    return out;
}

namespace {

template <class Tag>
MontParams<Tag> build_params() {
    using detail::VarUint;
    constexpr size_t N = Tag::N;

    MontParams<Tag> mp;
    VarUint p = VarUint::from_hex(Tag::modulus_hex());
    mp.modulus = p.to_limbs<N>();

    // inv = -p^(-1) mod 2^64, Newton iteration on the low limb
    u64 p0 = mp.modulus[0];
    u64 x = p0;  // correct mod 2^3 for odd p0
    for (int i = 0; i < 6; ++i) x *= 2 - p0 * x;
    mp.inv = ~x + 1;  // negate mod 2^64

    VarUint q, r;
    VarUint::divmod(VarUint::pow2(64 * N), p, q, r);
    mp.r1 = r.to_limbs<N>();
    VarUint::divmod(VarUint::pow2(128 * N), p, q, r);
    mp.r2 = r.to_limbs<N>();

    VarUint one = VarUint::from_u64(1);
    VarUint pm1 = VarUint::sub(p, one);
    mp.half_modulus = VarUint::div_u64(pm1, 2).to_limbs<N>();
    mp.exp_inverse = VarUint::sub(pm1, one).words_msb_trimmed();
    mp.exp_sqrt = VarUint::div_u64(VarUint::add(p, one), 4).words_msb_trimmed();
    return mp;
}

}  // namespace
}  // namespace detail

const char* FpTag::modulus_hex() {
    return "1a0111ea397fe69a4b1ba7b6434bacd764774b84f38512bf6730d2a0f6b0f624"
           "1eabfffeb153ffffb9feffffffffaaab";
}

const char* FrTag::modulus_hex() {
    return "73eda753299d7d483339d80809a1d80553bda402fffe5bfeffffffff00000001";
}

template <class Tag>
const MontParams<Tag>& mont_params() {
    static const MontParams<Tag> params = detail::build_params<Tag>();
    return params;
}

template const MontParams<FpTag>& mont_params<FpTag>();
template const MontParams<FrTag>& mont_params<FrTag>();

template <class Tag>
MontFe<Tag> MontFe<Tag>::one() {
    MontFe out;
    out.v_ = mont_params<Tag>().r1;
    return out;
}

template <class Tag>
MontFe<Tag> MontFe<Tag>::from_u64(uint64_t v) {
    const auto& mp = mont_params<Tag>();
    MontFe out;
    out.v_[0] = v;
    detail::mont_mul(out.v_, mp.r2, mp.modulus, mp.inv, out.v_);
    return out;
}

template <class Tag>
MontFe<Tag> MontFe<Tag>::from_hex(std::string_view hex) {
    auto v = detail::VarUint::from_hex(hex);
    Bytes be;
    auto words = v.words_msb_trimmed();
    for (size_t i = words.size(); i-- > 0;)
        for (int b = 7; b >= 0; --b) be.push_back(uint8_t(words[i] >> (8 * b)));
    return from_bytes_reduced(be.data(), be.size());
}

template <class Tag>
std::optional<MontFe<Tag>> MontFe<Tag>::from_bytes(const uint8_t* data) {
    const auto& mp = mont_params<Tag>();
    MontFe out;
    for (size_t i = 0; i < N; ++i) {
        detail::u64 w = 0;
        for (size_t b = 0; b < 8; ++b) w = (w << 8) | data[i * 8 + b];
        out.v_[N - 1 - i] = w;
    }
    if (detail::limbs_cmp(out.v_, mp.modulus) >= 0) return std::nullopt;
    detail::mont_mul(out.v_, mp.r2, mp.modulus, mp.inv, out.v_);
    return out;
}

template <class Tag>
std::optional<MontFe<Tag>> MontFe<Tag>::from_bytes(const Bytes& data) {
    if (data.size() != kBytes) return std::nullopt;
    return from_bytes(data.data());
}

template <class Tag>
MontFe<Tag> MontFe<Tag>::from_bytes_reduced(const uint8_t* data, size_t len) {
    const auto& mp = mont_params<Tag>();
    detail::Limbs<N> acc{};
    for (size_t i = 0; i < len; ++i) {
        for (int bit = 7; bit >= 0; --bit) {
            // acc = acc*2 + b, kept < p
            detail::u64 carry = (data[i] >> bit) & 1;
            for (size_t j = 0; j < N; ++j) {
                detail::u64 hi = acc[j] >> 63;
                acc[j] = (acc[j] << 1) | carry;
                carry = hi;
            }
            if (carry || detail::limbs_cmp(acc, mp.modulus) >= 0)
                detail::limbs_sub(acc, mp.modulus, acc);
        }
    }
    MontFe out;
    detail::mont_mul(acc, mp.r2, mp.modulus, mp.inv, out.v_);
    return out;
}

template <class Tag>
MontFe<Tag> MontFe<Tag>::from_bytes_reduced(const Bytes& data) {
    return from_bytes_reduced(data.data(), data.size());
}

template <class Tag>
void MontFe<Tag>::to_bytes(uint8_t out[kBytes]) const {
    const auto& mp = mont_params<Tag>();
    detail::Limbs<N> onev{};
    onev[0] = 1;
    detail::Limbs<N> canon;
    detail::mont_mul(v_, onev, mp.modulus, mp.inv, canon);
    for (size_t i = 0; i < N; ++i) {
        detail::u64 w = canon[N - 1 - i];
        for (size_t b = 0; b < 8; ++b) out[i * 8 + b] = uint8_t(w >> (8 * (7 - b)));
    }
}

template <class Tag>
Bytes MontFe<Tag>::to_bytes() const {
    Bytes out(kBytes);
    to_bytes(out.data());
    return out;
}

template <class Tag>
MontFe<Tag> MontFe<Tag>::operator+(const MontFe& o) const {
    const auto& mp = mont_params<Tag>();
    MontFe out;
    detail::u64 carry = detail::limbs_add(v_, o.v_, out.v_);
    if (carry || detail::limbs_cmp(out.v_, mp.modulus) >= 0)
        detail::limbs_sub(out.v_, mp.modulus, out.v_);
    return out;
}

template <class Tag>
MontFe<Tag> MontFe<Tag>::operator-(const MontFe& o) const {
    const auto& mp = mont_params<Tag>();
    MontFe out;
    detail::u64 borrow = detail::limbs_sub(v_, o.v_, out.v_);
    if (borrow) detail::limbs_add(out.v_, mp.modulus, out.v_);
    return out;
}

template <class Tag>
MontFe<Tag> MontFe<Tag>::operator*(const MontFe& o) const {
    const auto& mp = mont_params<Tag>();
    MontFe out;
    detail::mont_mul(v_, o.v_, mp.modulus, mp.inv, out.v_);
    return out;
}

template <class Tag>
MontFe<Tag> MontFe<Tag>::operator-() const {
    return zero() - *this;
}

template <class Tag>
MontFe<Tag> MontFe<Tag>::pow(const detail::u64* exp, size_t nwords) const {
    while (nwords > 0 && exp[nwords - 1] == 0) --nwords;
    MontFe acc = one();
    if (nwords == 0) return acc;
    size_t top = 63;
    while (top > 0 && !((exp[nwords - 1] >> top) & 1)) --top;
    for (size_t i = nwords; i-- > 0;) {
        for (size_t b = (i == nwords - 1 ? top + 1 : 64); b-- > 0;) {
            acc = acc.square();
            if ((exp[i] >> b) & 1) acc *= *this;
        }
    }
    return acc;
}

template <class Tag>
MontFe<Tag> MontFe<Tag>::inverse() const {
    const auto& mp = mont_params<Tag>();
    return pow(mp.exp_inverse);
}

template <class Tag>
std::optional<MontFe<Tag>> MontFe<Tag>::sqrt() const {
    const auto& mp = mont_params<Tag>();
    MontFe cand = pow(mp.exp_sqrt);
    if (cand.square() != *this) return std::nullopt;
    return cand;
}

template <class Tag>
bool MontFe<Tag>::lexicographically_largest() const {
    const auto& mp = mont_params<Tag>();
    detail::Limbs<N> onev{};
    onev[0] = 1;
    detail::Limbs<N> canon;
    detail::mont_mul(v_, onev, mp.modulus, mp.inv, canon);
    return detail::limbs_cmp(canon, mp.half_modulus) > 0;
}

template class MontFe<FpTag>;
template class MontFe<FrTag>;

Fr random_fr(crypto::Rng& rng) {
    Bytes wide = rng.bytes(48);
    return Fr::from_bytes_reduced(wide);
}

Fr random_nonzero_fr(crypto::Rng& rng) {
    for (;;) {
        Fr v = random_fr(rng);
        if (!v.is_zero()) return v;
    }
}

}  // namespace permadid::bls12
