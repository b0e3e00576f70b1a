#include "permadid/bbs/bbs.hpp"

#include <mutex>

#include "permadid/errors.hpp"

namespace permadid::bbs {

using bls12::Fp;
using bls12::Fr;
using bls12::G1;
using bls12::G1Affine;
using bls12::G2;
using bls12::G2Affine;

namespace {

const Bytes& dst_generator() {
    static const Bytes d = to_bytes("PERMADID-BBS-BLS12381-SHA256-GENERATOR");
    return d;
}
const Bytes& dst_message() {
    static const Bytes d = to_bytes("PERMADID-BBS-BLS12381-SHA256-MESSAGE");
    return d;
}
const Bytes& dst_domain() {
    static const Bytes d = to_bytes("PERMADID-BBS-BLS12381-SHA256-DOMAIN");
    return d;
}
const Bytes& dst_e() {
    static const Bytes d = to_bytes("PERMADID-BBS-BLS12381-SHA256-E");
    return d;
}
const Bytes& dst_challenge() {
    static const Bytes d = to_bytes("PERMADID-BBS-BLS12381-SHA256-CHALLENGE");
    return d;
}
const Bytes& dst_keygen() {
    static const Bytes d = to_bytes("PERMADID-BBS-BLS12381-SHA256-KEYGEN");
    return d;
}

void put_u64(Bytes& out, uint64_t v) {
    for (int i = 7; i >= 0; --i) out.push_back(uint8_t(v >> (8 * i)));
}

void put_g1(Bytes& out, const G1Affine& p) {
    auto enc = bls12::g1_to_compressed(p);
    out.insert(out.end(), enc.begin(), enc.end());
}

void put_scalar(Bytes& out, const Fr& s) {
    Bytes b = s.to_bytes();
    out.insert(out.end(), b.begin(), b.end());
}

Fr message_scalar(const Bytes& msg) { return hash_to_scalar(msg, dst_message()); }

/// domain = H(pk || L || Q1 || H_1..H_L || header): binds the signature to
/// the key, the generator set and the caller-provided context.
Fr compute_domain(const Bytes& public_key, size_t count, const Bytes& header) {
    const auto& gens = generators(count);
    Bytes data;
    data.insert(data.end(), public_key.begin(), public_key.end());
    put_u64(data, count);
    for (size_t i = 0; i <= count; ++i) put_g1(data, gens[i]);
    put_u64(data, header.size());
    data.insert(data.end(), header.begin(), header.end());
    return hash_to_scalar(data, dst_domain());
}

/// B = P1 + Q1*domain + sum H_j * m_j. The core commitment both signing and
/// every proof equation reduce to.
G1 commitment(const Fr& domain, const std::vector<Fr>& scalars) {
    const auto& gens = generators(scalars.size());
    G1 b = bls12::g1_generator() + G1::from_affine(gens[0]).mul(domain);
    for (size_t j = 0; j < scalars.size(); ++j)
        b += G1::from_affine(gens[j + 1]).mul(scalars[j]);
    return b;
}

}  // namespace

KeyPair KeyPair::generate(crypto::Rng& rng) {
    KeyPair kp;
    kp.secret = bls12::random_nonzero_fr(rng);
    kp.public_key = public_key_of(kp.secret);
    return kp;
}

KeyPair KeyPair::from_seed(const Bytes& seed) {
    if (seed.size() < 32) throw Error(Errc::SeedTooShort, "signing key seed must be at least 32 bytes");
    KeyPair kp;
    kp.secret = hash_to_scalar(seed, dst_keygen());
    kp.public_key = public_key_of(kp.secret);
    return kp;
}

Bytes public_key_of(const Fr& secret) {
    auto enc = bls12::g2_to_compressed(bls12::g2_generator().mul(secret).to_affine());
    return Bytes(enc.begin(), enc.end());
}

std::optional<G2Affine> parse_public_key(const Bytes& public_key) {
    if (public_key.size() != 96) return std::nullopt;
    auto pt = bls12::g2_from_compressed(public_key.data());
    if (!pt || pt->infinity) return std::nullopt;
    if (!bls12::g2_in_subgroup(G2::from_affine(*pt))) return std::nullopt;
    return pt;
}

Fr hash_to_scalar(const Bytes& data, const Bytes& dst) {
    for (int ctr = 0; ctr < 256; ++ctr) {
        Bytes attempt = data;
        attempt.push_back(uint8_t(ctr));
        Bytes uniform = bls12::expand_message_xmd(attempt, dst, 48);
        Fr out = Fr::from_bytes_reduced(uniform);
        if (!out.is_zero()) return out;
    }
    throw Error(Errc::Internal, "hash_to_scalar exhausted counter space");
}

const std::vector<G1Affine>& generators(size_t count) {
    static std::mutex mu;
    static std::vector<G1Affine> cache;
    std::lock_guard lock(mu);
    if (count > kMaxMessages) throw Error(Errc::TooManyMessages, "generator index beyond supported message count");
    while (cache.size() <= kMaxMessages) {
        Bytes label = to_bytes("generator");
        put_u64(label, cache.size());
        cache.push_back(bls12::hash_to_g1(label, dst_generator()).to_affine());
    }
    return cache;
}

Bytes signature_to_bytes(const Signature& sig) {
    Bytes out;
    out.reserve(kSignatureBytes);
    put_g1(out, sig.a);
    put_scalar(out, sig.e);
    return out;
}

std::optional<Signature> signature_from_bytes(const Bytes& data) {
    if (data.size() != kSignatureBytes) return std::nullopt;
    auto a = bls12::g1_from_compressed(data.data());
    if (!a) return std::nullopt;
    auto e = Fr::from_bytes(data.data() + 48);
    if (!e) return std::nullopt;
    return Signature{*a, *e};
}

Signature sign(const Fr& secret, const Bytes& header, const std::vector<Bytes>& messages) {
    if (messages.size() > kMaxMessages)
        throw Error(Errc::TooManyMessages, "at most 64 messages per signature");

    std::vector<Fr> scalars;
    scalars.reserve(messages.size());
    for (const auto& m : messages) scalars.push_back(message_scalar(m));

    Fr domain = compute_domain(public_key_of(secret), messages.size(), header);

    Bytes e_input;
    put_scalar(e_input, secret);
    put_scalar(e_input, domain);
    for (const auto& s : scalars) put_scalar(e_input, s);
    Fr e = hash_to_scalar(e_input, dst_e());

    Fr denom = secret + e;
    if (denom.is_zero()) throw Error(Errc::Internal, "degenerate signature exponent");
    G1 a = commitment(domain, scalars).mul(denom.inverse());
    return Signature{a.to_affine(), e};
}

bool verify(const Bytes& public_key, const Bytes& header, const std::vector<Bytes>& messages,
            const Signature& sig) {
    if (messages.size() > kMaxMessages) return false;
    auto w = parse_public_key(public_key);
    if (!w) return false;
    if (sig.a.infinity) return false;

    std::vector<Fr> scalars;
    scalars.reserve(messages.size());
    for (const auto& m : messages) scalars.push_back(message_scalar(m));
    Fr domain = compute_domain(public_key, messages.size(), header);
    G1 b = commitment(domain, scalars);

    // e(A, W + e*P2) == e(B, P2)
    G2Affine lhs_g2 = (G2::from_affine(*w) + bls12::g2_generator().mul(sig.e)).to_affine();
    return bls12::pairing_product_is_one({
        {sig.a, lhs_g2},
        {(-b).to_affine(), bls12::g2_generator().to_affine()},
    });
}

namespace {

Fr proof_challenge(const G1Affine& abar, const G1Affine& bbar, const G1Affine& d,
                   const G1Affine& t1, const G1Affine& t2,
                   const std::vector<std::pair<size_t, Fr>>& disclosed, const Fr& domain,
                   const Bytes& presentation_header) {
    Bytes data;
    put_g1(data, abar);
    put_g1(data, bbar);
    put_g1(data, d);
    put_g1(data, t1);
    put_g1(data, t2);
    put_u64(data, disclosed.size());
    for (const auto& [idx, scalar] : disclosed) {
        put_u64(data, idx);
        put_scalar(data, scalar);
    }
    put_scalar(data, domain);
    put_u64(data, presentation_header.size());
    data.insert(data.end(), presentation_header.begin(), presentation_header.end());
    return hash_to_scalar(data, dst_challenge());
}

}  // namespace

Bytes create_proof(const Bytes& public_key, const Signature& sig, const Bytes& header,
                   const Bytes& presentation_header, const std::vector<Bytes>& messages,
                   const std::vector<size_t>& disclosed, crypto::Rng& rng) {
    size_t total = messages.size();
    if (total > kMaxMessages) throw Error(Errc::TooManyMessages, "at most 64 messages per signature");
    for (size_t i = 0; i < disclosed.size(); ++i) {
        if (disclosed[i] >= total)
            throw Error(Errc::IndexOutOfRange, "disclosed index beyond message count");
        if (i > 0 && disclosed[i] <= disclosed[i - 1])
            throw Error(Errc::IndexOutOfRange, "disclosed indexes must be strictly increasing");
    }

    std::vector<Fr> scalars;
    scalars.reserve(total);
    for (const auto& m : messages) scalars.push_back(message_scalar(m));
    Fr domain = compute_domain(public_key, total, header);
    G1 b = commitment(domain, scalars);

    std::vector<size_t> hidden;
    hidden.reserve(total - disclosed.size());
    {
        size_t di = 0;
        for (size_t j = 0; j < total; ++j) {
            if (di < disclosed.size() && disclosed[di] == j)
                ++di;
            else
                hidden.push_back(j);
        }
    }

    Fr r1 = bls12::random_nonzero_fr(rng);
    Fr r2 = bls12::random_nonzero_fr(rng);
    Fr r3 = r2.inverse();

    G1 abar_j = G1::from_affine(sig.a).mul(r1 * r2);
    G1 d_j = b.mul(r2);
    G1 bbar_j = d_j.mul(r1) - abar_j.mul(sig.e);

    Fr e_t = bls12::random_fr(rng);
    Fr r1_t = bls12::random_fr(rng);
    Fr r3_t = bls12::random_fr(rng);
    std::vector<Fr> m_t(hidden.size());
    for (auto& t : m_t) t = bls12::random_fr(rng);

    const auto& gens = generators(total);
    G1 t1_j = abar_j.mul(e_t) + d_j.mul(r1_t);
    G1 t2_j = d_j.mul(r3_t);
    for (size_t k = 0; k < hidden.size(); ++k)
        t2_j += G1::from_affine(gens[hidden[k] + 1]).mul(m_t[k]);

    G1Affine abar = abar_j.to_affine();
    G1Affine bbar = bbar_j.to_affine();
    G1Affine d = d_j.to_affine();

    std::vector<std::pair<size_t, Fr>> disclosed_scalars;
    disclosed_scalars.reserve(disclosed.size());
    for (size_t idx : disclosed) disclosed_scalars.emplace_back(idx, scalars[idx]);

    Fr c = proof_challenge(abar, bbar, d, t1_j.to_affine(), t2_j.to_affine(), disclosed_scalars,
                           domain, presentation_header);

    Fr e_hat = e_t + sig.e * c;
    Fr r1_hat = r1_t - r1 * c;
    Fr r3_hat = r3_t - r3 * c;

    Bytes out;
    out.reserve(kProofFixedBytes + kScalarBytes * (3 + hidden.size()));
    put_g1(out, abar);
    put_g1(out, bbar);
    put_g1(out, d);
    put_scalar(out, e_hat);
    put_scalar(out, r1_hat);
    put_scalar(out, r3_hat);
    for (size_t k = 0; k < hidden.size(); ++k) put_scalar(out, m_t[k] + scalars[hidden[k]] * c);
    put_scalar(out, c);
    return out;
}

bool verify_proof(const Bytes& public_key, const Bytes& proof, const Bytes& header,
                  const Bytes& presentation_header,
                  const std::vector<std::pair<size_t, Bytes>>& disclosed_messages,
                  size_t total_messages) {
    if (total_messages > kMaxMessages) return false;
    if (disclosed_messages.size() > total_messages) return false;
    for (size_t i = 0; i < disclosed_messages.size(); ++i) {
        if (disclosed_messages[i].first >= total_messages) return false;
        if (i > 0 && disclosed_messages[i].first <= disclosed_messages[i - 1].first) return false;
    }
    auto w = parse_public_key(public_key);
    if (!w) return false;

    size_t hidden_count = total_messages - disclosed_messages.size();
    if (proof.size() != kProofFixedBytes + kScalarBytes * (3 + hidden_count)) return false;

    auto abar = bls12::g1_from_compressed(proof.data());
    auto bbar = bls12::g1_from_compressed(proof.data() + 48);
    auto d = bls12::g1_from_compressed(proof.data() + 96);
    if (!abar || !bbar || !d) return false;
    if (abar->infinity) return false;
    for (const auto* pt : {&*abar, &*bbar, &*d})
        if (!bls12::g1_in_subgroup(G1::from_affine(*pt))) return false;

    size_t off = 144;
    auto read_scalar = [&](size_t at) { return Fr::from_bytes(proof.data() + at); };
    auto e_hat = read_scalar(off);
    auto r1_hat = read_scalar(off + 32);
    auto r3_hat = read_scalar(off + 64);
    if (!e_hat || !r1_hat || !r3_hat) return false;
    off += 96;
    std::vector<Fr> m_hat;
    m_hat.reserve(hidden_count);
    for (size_t k = 0; k < hidden_count; ++k) {
        auto s = read_scalar(off);
        if (!s) return false;
        m_hat.push_back(*s);
        off += 32;
    }
    auto c = read_scalar(off);
    if (!c) return false;

    std::vector<std::pair<size_t, Fr>> disclosed_scalars;
    disclosed_scalars.reserve(disclosed_messages.size());
    for (const auto& [idx, msg] : disclosed_messages)
        disclosed_scalars.emplace_back(idx, message_scalar(msg));

    Fr domain = compute_domain(public_key, total_messages, header);
    const auto& gens = generators(total_messages);

    G1 bv = bls12::g1_generator() + G1::from_affine(gens[0]).mul(domain);
    for (const auto& [idx, scalar] : disclosed_scalars)
        bv += G1::from_affine(gens[idx + 1]).mul(scalar);

    G1 abar_j = G1::from_affine(*abar);
    G1 bbar_j = G1::from_affine(*bbar);
    G1 d_j = G1::from_affine(*d);

    G1 t1 = bbar_j.mul(*c) + abar_j.mul(*e_hat) + d_j.mul(*r1_hat);
    G1 t2 = bv.mul(*c) + d_j.mul(*r3_hat);
    {
        size_t di = 0, k = 0;
        for (size_t j = 0; j < total_messages; ++j) {
            if (di < disclosed_scalars.size() && disclosed_scalars[di].first == j) {
                ++di;
            } else {
                t2 += G1::from_affine(gens[j + 1]).mul(m_hat[k]);
                ++k;
            }
        }
    }

    Fr expect = proof_challenge(*abar, *bbar, *d, t1.to_affine(), t2.to_affine(),
                                disclosed_scalars, domain, presentation_header);
    if (expect != *c) return false;

    return bls12::pairing_product_is_one({
        {*abar, *w},
        {(-bbar_j).to_affine(), bls12::g2_generator().to_affine()},
    });
}

}  // namespace permadid::bbs
