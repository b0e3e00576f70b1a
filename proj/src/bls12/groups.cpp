#include "permadid/bls12/groups.hpp"

#include <cstring>

#include "permadid/crypto.hpp"
#include "permadid/errors.hpp"

namespace permadid::bls12 {

namespace {

using detail::VarUint;

Bytes varuint_to_be_bytes(const VarUint& v) {
    auto words = v.words_msb_trimmed();
    Bytes out;
    for (size_t i = words.size(); i-- > 0;)
        for (int b = 7; b >= 0; --b) out.push_back(uint8_t(words[i] >> (8 * b)));
    // strip leading zero bytes, keep at least one
    size_t skip = 0;
    while (skip + 1 < out.size() && out[skip] == 0) ++skip;
    return Bytes(out.begin() + ptrdiff_t(skip), out.end());
}

struct GroupParams {
    Fp b1;
    Fp2 b2;
    G1 gen1;
    G2 gen2;
    Bytes order_be;     // r
    Bytes g1_cofactor;  // (x-1)^2 / 3 with x = -0xd201000000010000
};

const GroupParams& group_params() {
    static const GroupParams gp = [] {
        GroupParams g;
        g.b1 = Fp::from_u64(4);
        g.b2 = Fp2{Fp::from_u64(4), Fp::from_u64(4)};
        g.gen1 = G1::from_affine(G1Affine::from_xy(
            Fp::from_hex("17f1d3a73197d7942695638c4fa9ac0fc3688c4f9774b905"
                         "a14e3a3f171bac586c55e83ff97a1aeffb3af00adb22c6bb"),
            Fp::from_hex("08b3f481e3aaa0f1a09e30ed741d8ae4fcf5e095d5d00af6"
                         "00db18cb2c04b3edd03cc744a2888ae40caa232946c5e7e1")));
        g.gen2 = G2::from_affine(G2Affine::from_xy(
            Fp2{Fp::from_hex("024aa2b2f08f0a91260805272dc51051c6e47ad4fa403b02"
                             "b4510b647ae3d1770bac0326a805bbefd48056c8c121bdb8"),
                Fp::from_hex("13e02b6052719f607dacd3a088274f65596bd0d09920b61a"
                             "b5da61bbdc7f5049334cf11213945d57e5ac7d055d042b7e")},
            Fp2{Fp::from_hex("0ce5d527727d6e118cc9cdc6da2e351aadfd9baa8cbdd3a7"
                             "6d429a695160d12c923ac9cc3baca289e193548608b82801"),
                Fp::from_hex("0606c4a02ea734cc32acd2b02bc28b99cb3e287e85a763af"
                             "267492ab572e99ab3f370d275cec1da1aaa9075ff05f79be")}));
        g.order_be = varuint_to_be_bytes(VarUint::from_hex(FrTag::modulus_hex()));
        VarUint xm1 = VarUint::from_hex("d201000000010001");  // |x| + 1 = |x - 1| for negative x
        g.g1_cofactor = varuint_to_be_bytes(VarUint::div_u64(VarUint::mul(xm1, xm1), 3));
        return g;
    }();
    return gp;
}

}  // namespace

const Fp& g1_coeff_b() { return group_params().b1; }
const Fp2& g2_coeff_b() { return group_params().b2; }
const G1& g1_generator() { return group_params().gen1; }
const G2& g2_generator() { return group_params().gen2; }
const Bytes& fr_order_bytes() { return group_params().order_be; }

bool g1_on_curve(const G1Affine& p) {
    if (p.infinity) return true;
    return p.y.square() == p.x.square() * p.x + g1_coeff_b();
}

bool g2_on_curve(const G2Affine& p) {
    if (p.infinity) return true;
    return p.y.square() == p.x.square() * p.x + g2_coeff_b();
}

bool g1_in_subgroup(const G1& p) {
    const Bytes& r = fr_order_bytes();
    return p.mul_bytes(r.data(), r.size()).is_identity();
}

bool g2_in_subgroup(const G2& p) {
    const Bytes& r = fr_order_bytes();
    return p.mul_bytes(r.data(), r.size()).is_identity();
}

std::array<uint8_t, 48> g1_to_compressed(const G1Affine& p) {
    std::array<uint8_t, 48> out{};
    if (p.infinity) {
        out[0] = 0xc0;
        return out;
    }
    p.x.to_bytes(out.data());
    out[0] |= 0x80;
    if (p.y.lexicographically_largest()) out[0] |= 0x20;
    return out;
}

std::array<uint8_t, 96> g2_to_compressed(const G2Affine& p) {
    std::array<uint8_t, 96> out{};
    if (p.infinity) {
        out[0] = 0xc0;
        return out;
    }
    p.x.c1.to_bytes(out.data());
    p.x.c0.to_bytes(out.data() + 48);
    out[0] |= 0x80;
    if (p.y.lexicographically_largest()) out[0] |= 0x20;
    return out;
}

std::optional<G1Affine> g1_from_compressed(const uint8_t* data) {
    uint8_t flags = data[0];
    if (!(flags & 0x80)) return std::nullopt;
    bool infinity = flags & 0x40;
    bool y_largest = flags & 0x20;
    uint8_t masked[48];
    std::memcpy(masked, data, 48);
    masked[0] &= 0x1f;
    if (infinity) {
        if (y_largest) return std::nullopt;
        for (uint8_t b : masked)
            if (b != 0) return std::nullopt;
        return G1Affine::identity();
    }
    auto x = Fp::from_bytes(masked);
    if (!x) return std::nullopt;
    auto y = (x->square() * *x + g1_coeff_b()).sqrt();
    if (!y) return std::nullopt;
    if (y->lexicographically_largest() != y_largest) *y = -*y;
    return G1Affine::from_xy(*x, *y);
}

std::optional<G2Affine> g2_from_compressed(const uint8_t* data) {
    uint8_t flags = data[0];
    if (!(flags & 0x80)) return std::nullopt;
    bool infinity = flags & 0x40;
    bool y_largest = flags & 0x20;
    uint8_t masked[96];
    std::memcpy(masked, data, 96);
    masked[0] &= 0x1f;
    if (infinity) {
        if (y_largest) return std::nullopt;
        for (uint8_t b : masked)
            if (b != 0) return std::nullopt;
        return G2Affine::identity();
    }
    auto xc1 = Fp::from_bytes(masked);
    auto xc0 = Fp::from_bytes(masked + 48);
    if (!xc0 || !xc1) return std::nullopt;
    Fp2 x{*xc0, *xc1};
    auto y = (x.square() * x + g2_coeff_b()).sqrt();
    if (!y) return std::nullopt;
    if (y->lexicographically_largest() != y_largest) *y = -*y;
    return G2Affine::from_xy(x, *y);
}

Bytes expand_message_xmd(const Bytes& msg, const Bytes& dst, size_t len) {
    constexpr size_t kHashLen = 32;
    constexpr size_t kBlockLen = 64;
    size_t ell = (len + kHashLen - 1) / kHashLen;
    if (ell > 255 || len > 65535 || dst.size() > 255)
        throw Error(Errc::Internal, "expand_message_xmd parameter out of range");

    Bytes dst_prime = dst;
    dst_prime.push_back(uint8_t(dst.size()));

    crypto::Sha256Stream s0;
    Bytes zpad(kBlockLen, 0);
    s0.update(zpad);
    s0.update(msg);
    s0.update_byte(uint8_t(len >> 8));
    s0.update_byte(uint8_t(len & 0xff));
    s0.update_byte(0);
    s0.update(dst_prime);
    crypto::Digest b0 = s0.finish();

    Bytes out;
    out.reserve(ell * kHashLen);
    crypto::Digest prev{};
    for (size_t i = 1; i <= ell; ++i) {
        crypto::Sha256Stream si;
        if (i == 1) {
            si.update(b0.data(), b0.size());
        } else {
            uint8_t mixed[kHashLen];
            for (size_t j = 0; j < kHashLen; ++j) mixed[j] = b0[j] ^ prev[j];
            si.update(mixed, kHashLen);
        }
        si.update_byte(uint8_t(i));
        si.update(dst_prime);
        prev = si.finish();
        out.insert(out.end(), prev.begin(), prev.end());
    }
    out.resize(len);
    return out;
}

G1 hash_to_g1(const Bytes& msg, const Bytes& dst) {
    const auto& gp = group_params();
    for (int ctr = 0; ctr < 256; ++ctr) {
        Bytes attempt = msg;
        attempt.push_back(uint8_t(ctr));
        Bytes uniform = expand_message_xmd(attempt, dst, 49);
        Fp x = Fp::from_bytes_reduced(uniform.data(), 48);
        auto y = (x.square() * x + gp.b1).sqrt();
        if (!y) continue;
        bool want_largest = uniform[48] & 1;
        if (y->lexicographically_largest() != want_largest) *y = -*y;
        G1 p = G1::from_affine(G1Affine::from_xy(x, *y));
        G1 cleared = p.mul_bytes(gp.g1_cofactor.data(), gp.g1_cofactor.size());
        if (cleared.is_identity()) continue;
        return cleared;
    }
    throw Error(Errc::Internal, "hash_to_g1 exhausted counter space");
}

}  // namespace permadid::bls12
