#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>

#include "permadid/bytes.hpp"

namespace permadid::crypto {

using Digest = std::array<uint8_t, 32>;

void init();

Digest sha256(const uint8_t* data, size_t len);
Digest sha256(const Bytes& data);
Digest sha256(std::string_view data);

/// 43-character base64url form of a 32-byte digest; the universal id shape
/// for transactions, addresses and DIDs in this codebase.
std::string digest_to_id(const Digest& d);

/// Content address of a public key: base64url(sha256(key bytes)).
std::string key_address(const Bytes& public_key);

/// Incremental SHA-256, for hashing large serializations without copies.
class Sha256Stream {
public:
    Sha256Stream();
    void update(const uint8_t* data, size_t len);
    void update(const Bytes& data);
    void update(std::string_view data);
    void update_byte(uint8_t value) { update(&value, 1); }
    void update_u64(uint64_t value);  // big-endian
    Digest finish();

private:
    std::array<uint8_t, 208> state_;  // sized for crypto_hash_sha256_state
};

struct Ed25519KeyPair {
    Bytes public_key;  // 32 bytes
    Bytes secret_key;  // 64 bytes (libsodium layout: seed || public)

    static Ed25519KeyPair generate();
    static Ed25519KeyPair from_seed(const Bytes& seed32);

    std::string address() const { return key_address(public_key); }
};

Bytes ed25519_sign(const Bytes& secret_key, const Bytes& message);
bool ed25519_verify(const Bytes& public_key, const Bytes& message, const Bytes& signature);

/// Structural check: 32 bytes decoding to a valid curve point.
bool ed25519_valid_pubkey(const Bytes& public_key);

/// Randomness source; proof generation and key generation draw through this
/// so tests can substitute a deterministic stream.
class Rng {
public:
    virtual ~Rng() = default;
    virtual void fill(uint8_t* out, size_t len) = 0;
    Bytes bytes(size_t len) {
        Bytes b(len);
        fill(b.data(), len);
        return b;
    }
};

/// Process-wide CSPRNG (libsodium).
Rng& system_rng();

/// Deterministic stream expanded from a 32-byte seed.
class SeededRng : public Rng {
public:
    explicit SeededRng(const Bytes& seed);
    void fill(uint8_t* out, size_t len) override;

private:
    std::array<uint8_t, 32> seed_;
    uint64_t counter_ = 0;
};

}  // namespace permadid::crypto
