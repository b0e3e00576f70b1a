#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

#include "permadid/bytes.hpp"

/// Encrypted key file with per-consumer capability grants. Key material is
/// sealed under a passphrase (Argon2id then XChaCha20-Poly1305); the file
/// header, grants included, is bound into the AEAD as associated data, so
/// editing any header byte on disk fails authentication exactly like a
/// wrong passphrase.
namespace permadid::keystore {

enum class Capability {
    SignTx,          // sign weave transactions
    SignCredential,  // use credential signing keys
    Decrypt,         // export raw key bytes
};

const char* capability_name(Capability capability);
Capability capability_from_name(const std::string& name);  // throws ParseError

struct KdfParams {
    Bytes salt;         // 16 bytes, fresh per save
    uint64_t opslimit;  // Argon2id pass count
    uint64_t memlimit;  // Argon2id memory, bytes

    static KdfParams interactive();
    /// Cheapest parameters libsodium accepts; tests only.
    static KdfParams minimal();
};

inline constexpr uint32_t kKeystoreVersion = 1;

class Keystore {
public:
    Keystore() = default;

    /// Labeled secret bytes; an existing label is overwritten.
    void put_key(const std::string& label, const Bytes& secret);
    bool has_key(const std::string& label) const;
    void remove_key(const std::string& label);  // throws NotFound

    /// Owner-level view, ungated: holding the open keystore is holding the
    /// passphrase.
    const std::map<std::string, Bytes>& keys() const { return keys_; }

    void grant(const std::string& consumer, Capability capability);
    void revoke_grant(const std::string& consumer, Capability capability);
    bool has_grant(const std::string& consumer, Capability capability) const;
    const std::map<std::string, std::set<Capability>>& grants() const { return grants_; }

    /// Throws PermissionDenied unless the consumer holds the capability.
    void require(const std::string& consumer, Capability capability) const;

    /// Consumer-gated operations.
    Bytes sign_tx(const std::string& consumer, const std::string& label,
                  const Bytes& message) const;
    Bytes credential_key_bytes(const std::string& consumer, const std::string& label) const;
    Bytes export_key(const std::string& consumer, const std::string& label) const;

    /// Seals keys and grants to disk. A fresh salt and nonce every time.
    void save(const std::string& path, const std::string& passphrase,
              const KdfParams& cost = KdfParams::interactive()) const;

    /// Opens a sealed file. A wrong passphrase, or any tampering with the
    /// ciphertext or header, fails authentication before any plaintext is
    /// produced.
    static Keystore load(const std::string& path, const std::string& passphrase);

private:
    const Bytes& secret(const std::string& label) const;  // throws NotFound

    std::map<std::string, Bytes> keys_;
    std::map<std::string, std::set<Capability>> grants_;
};

}  // namespace permadid::keystore
