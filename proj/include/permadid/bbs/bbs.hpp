#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "permadid/bls12/pairing.hpp"
#include "permadid/bytes.hpp"
#include "permadid/crypto.hpp"

namespace permadid::bbs {

/// Upper bound on messages per signature; generator derivation is cached up
/// to this count.
inline constexpr size_t kMaxMessages = 64;

inline constexpr size_t kPublicKeyBytes = 96;            // compressed G2
inline constexpr size_t kSignatureBytes = 48 + 32;       // A, e
inline constexpr size_t kProofFixedBytes = 3 * 48 + 32;  // Abar, Bbar, D, challenge
inline constexpr size_t kScalarBytes = 32;

/// Multi-message signing keypair. The public key is a compressed G2 point.
struct KeyPair {
    bls12::Fr secret;
    Bytes public_key;  // 96 bytes

    static KeyPair generate(crypto::Rng& rng);
    static KeyPair from_seed(const Bytes& seed);  // deterministic; seed >= 32 bytes
};

Bytes public_key_of(const bls12::Fr& secret);

/// Decode and validate a public key: on curve, in the r-order subgroup and
/// not the identity.
std::optional<bls12::G2Affine> parse_public_key(const Bytes& public_key);

/// Hash arbitrary bytes to a nonzero scalar under a domain separation tag.
bls12::Fr hash_to_scalar(const Bytes& data, const Bytes& dst);

/// Message generators H_1..H_count (index 0 yields the domain generator Q1).
const std::vector<bls12::G1Affine>& generators(size_t count);

struct Signature {
    bls12::G1Affine a;
    bls12::Fr e;
};

Bytes signature_to_bytes(const Signature& sig);
std::optional<Signature> signature_from_bytes(const Bytes& data);

/// Sign an ordered message list under a binding header. Deterministic for
/// fixed inputs.
Signature sign(const bls12::Fr& secret, const Bytes& header, const std::vector<Bytes>& messages);

bool verify(const Bytes& public_key, const Bytes& header, const std::vector<Bytes>& messages,
            const Signature& sig);

/// Zero-knowledge selective-disclosure proof of a signature. `disclosed`
/// holds strictly increasing message indexes revealed to the verifier;
/// everything else stays hidden. The presentation header binds the proof to
/// a verifier-chosen context and is not covered by the signature itself.
Bytes create_proof(const Bytes& public_key, const Signature& sig, const Bytes& header,
                   const Bytes& presentation_header, const std::vector<Bytes>& messages,
                   const std::vector<size_t>& disclosed, crypto::Rng& rng);

/// Verify a selective-disclosure proof against the disclosed subset, given as
/// (index, message) pairs in strictly increasing index order. total_messages
/// is the signed list length and must match what the signer used.
bool verify_proof(const Bytes& public_key, const Bytes& proof, const Bytes& header,
                  const Bytes& presentation_header,
                  const std::vector<std::pair<size_t, Bytes>>& disclosed_messages,
                  size_t total_messages);

}  // namespace permadid::bbs
