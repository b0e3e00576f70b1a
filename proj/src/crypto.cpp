#include "permadid/crypto.hpp"

#include <sodium.h>

#include <cstring>
#include <stdexcept>

#include "permadid/errors.hpp"

namespace permadid::crypto {

void init() {
    static const int rc = sodium_init();
    if (rc < 0) throw Error(Errc::Internal, "libsodium initialization failed");
}

Digest sha256(const uint8_t* data, size_t len) {
    init();
    Digest out;
    crypto_hash_sha256(out.data(), data, len);
    return out;
}

Digest sha256(const Bytes& data) { return sha256(data.data(), data.size()); }
Digest sha256(std::string_view data) { return sha256(reinterpret_cast<const uint8_t*>(data.data()), data.size()); }

std::string digest_to_id(const Digest& d) { return base64url_encode(d.data(), d.size()); }

std::string key_address(const Bytes& public_key) { return digest_to_id(sha256(public_key)); }

Sha256Stream::Sha256Stream() {
    init();
    static_assert(sizeof(crypto_hash_sha256_state) <= sizeof(state_));
    crypto_hash_sha256_init(reinterpret_cast<crypto_hash_sha256_state*>(state_.data()));
}

void Sha256Stream::update(const uint8_t* data, size_t len) {
    crypto_hash_sha256_update(reinterpret_cast<crypto_hash_sha256_state*>(state_.data()), data, len);
}

void Sha256Stream::update(const Bytes& data) { update(data.data(), data.size()); }

void Sha256Stream::update(std::string_view data) {
    update(reinterpret_cast<const uint8_t*>(data.data()), data.size());
}

void Sha256Stream::update_u64(uint64_t value) {
    uint8_t buf[8];
    for (int i = 7; i >= 0; --i) {
        buf[i] = uint8_t(value & 0xff);
        value >>= 8;
    }
    update(buf, 8);
}

Digest Sha256Stream::finish() {
    Digest out;
    crypto_hash_sha256_final(reinterpret_cast<crypto_hash_sha256_state*>(state_.data()), out.data());
    return out;
}

Ed25519KeyPair Ed25519KeyPair::generate() {
    init();
    Ed25519KeyPair kp;
    kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
    kp.secret_key.resize(crypto_sign_SECRETKEYBYTES);
    crypto_sign_keypair(kp.public_key.data(), kp.secret_key.data());
    return kp;
}

Ed25519KeyPair Ed25519KeyPair::from_seed(const Bytes& seed32) {
    init();
    if (seed32.size() != crypto_sign_SEEDBYTES) throw Error(Errc::InvalidKey, "ed25519 seed must be 32 bytes");
    Ed25519KeyPair kp;
    kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
    kp.secret_key.resize(crypto_sign_SECRETKEYBYTES);
    crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), seed32.data());
    return kp;
}

Bytes ed25519_sign(const Bytes& secret_key, const Bytes& message) {
    init();
    if (secret_key.size() != crypto_sign_SECRETKEYBYTES) throw Error(Errc::InvalidKey, "bad ed25519 secret key size");
    Bytes sig(crypto_sign_BYTES);
    crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), secret_key.data());
    return sig;
}

bool ed25519_verify(const Bytes& public_key, const Bytes& message, const Bytes& signature) {
    init();
    if (public_key.size() != crypto_sign_PUBLICKEYBYTES || signature.size() != crypto_sign_BYTES) return false;
    return crypto_sign_verify_detached(signature.data(), message.data(), message.size(), public_key.data()) == 0;
}

bool ed25519_valid_pubkey(const Bytes& public_key) {
    init();
    return public_key.size() == crypto_sign_PUBLICKEYBYTES &&
           crypto_core_ed25519_is_valid_point(public_key.data()) == 1;
}

namespace {

class SystemRng : public Rng {
public:
    void fill(uint8_t* out, size_t len) override {
        init();
        randombytes_buf(out, len);
    }
};

}  // namespace

Rng& system_rng() {
    static SystemRng rng;
    return rng;
}

SeededRng::SeededRng(const Bytes& seed) {
    init();
    if (seed.size() < 16) throw Error(Errc::SeedTooShort, "rng seed must be at least 16 bytes");
    Digest d = sha256(seed);
    std::memcpy(seed_.data(), d.data(), 32);
}

void SeededRng::fill(uint8_t* out, size_t len) {
    // Each request expands a fresh subseed so call sizes do not affect the stream.
    Sha256Stream s;
    s.update(seed_.data(), seed_.size());
    s.update_u64(counter_++);
    Digest sub = s.finish();
    randombytes_buf_deterministic(out, len, sub.data());
}

}  // namespace permadid::crypto
