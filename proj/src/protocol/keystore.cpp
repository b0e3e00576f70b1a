#include "permadid/protocol/keystore.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include <sodium.h>

#include <json.hpp>

#include "permadid/crypto.hpp"
#include "permadid/errors.hpp"

namespace permadid::keystore {

namespace {

using nlohmann::json;

constexpr size_t kSaltBytes = 16;
constexpr size_t kAeadKeyBytes = crypto_aead_xchacha20poly1305_ietf_KEYBYTES;
constexpr size_t kNonceBytes = crypto_aead_xchacha20poly1305_ietf_NPUBBYTES;

Bytes derive_key(const std::string& passphrase, const KdfParams& kdf) {
    crypto::init();
    if (kdf.salt.size() != kSaltBytes) {
        throw Error(Errc::ParseError, "keystore salt must be 16 bytes");
    }
    Bytes key(kAeadKeyBytes);
    if (crypto_pwhash(key.data(), key.size(), passphrase.data(), passphrase.size(),
                      kdf.salt.data(), kdf.opslimit, kdf.memlimit,
                      crypto_pwhash_ALG_ARGON2ID13) != 0) {
        throw Error(Errc::Internal, "key derivation failed (out of memory?)");
    }
    return key;
}

json grants_to_json(const std::map<std::string, std::set<Capability>>& grants) {
    json j = json::object();
    for (const auto& [consumer, capabilities] : grants) {
        json list = json::array();
        for (Capability capability : capabilities) list.push_back(capability_name(capability));
        j[consumer] = std::move(list);
    }
    return j;
}

/// Header without the ciphertext; its canonical dump is the associated
/// data, so the grants map and KDF parameters are tamper-evident.
json header_json(uint32_t version, const KdfParams& kdf, const Bytes& nonce, const json& grants) {
    json j;
    j["version"] = version;
    j["kdf"] = {{"salt", base64url_encode(kdf.salt)},
                {"ops", kdf.opslimit},
                {"mem", kdf.memlimit}};
    j["nonce"] = base64url_encode(nonce);
    j["grants"] = grants;
    return j;
}

}  // namespace

const char* capability_name(Capability capability) {
    switch (capability) {
        case Capability::SignTx: return "sign_tx";
        case Capability::SignCredential: return "sign_credential";
        case Capability::Decrypt: return "decrypt";
    }
    return "sign_tx";
}

Capability capability_from_name(const std::string& name) {
    if (name == "sign_tx") return Capability::SignTx;
    if (name == "sign_credential") return Capability::SignCredential;
    if (name == "decrypt") return Capability::Decrypt;
    throw Error(Errc::ParseError, "unknown capability: " + name);
}

KdfParams KdfParams::interactive() {
    crypto::init();
    KdfParams p;
    p.salt = crypto::system_rng().bytes(kSaltBytes);
    p.opslimit = crypto_pwhash_OPSLIMIT_INTERACTIVE;
    p.memlimit = crypto_pwhash_MEMLIMIT_INTERACTIVE;
    return p;
}

KdfParams KdfParams::minimal() {
    crypto::init();
    KdfParams p;
    p.salt = crypto::system_rng().bytes(kSaltBytes);
    p.opslimit = crypto_pwhash_OPSLIMIT_MIN;
    p.memlimit = crypto_pwhash_MEMLIMIT_MIN;
    return p;
}

void Keystore::put_key(const std::string& label, const Bytes& secret) {
    if (label.empty()) throw Error(Errc::ParseError, "key label must not be empty");
    keys_[label] = secret;
}

bool Keystore::has_key(const std::string& label) const { return keys_.count(label) != 0; }

void Keystore::remove_key(const std::string& label) {
    if (keys_.erase(label) == 0) throw Error(Errc::NotFound, "no key labeled " + label);
}

const Bytes& Keystore::secret(const std::string& label) const {
    auto it = keys_.find(label);
    if (it == keys_.end()) throw Error(Errc::NotFound, "no key labeled " + label);
    return it->second;
}

void Keystore::grant(const std::string& consumer, Capability capability) {
    if (consumer.empty()) throw Error(Errc::ParseError, "consumer name must not be empty");
    grants_[consumer].insert(capability);
}

void Keystore::revoke_grant(const std::string& consumer, Capability capability) {
    auto it = grants_.find(consumer);
    if (it == grants_.end()) return;
    it->second.erase(capability);
    if (it->second.empty()) grants_.erase(it);
}

bool Keystore::has_grant(const std::string& consumer, Capability capability) const {
    auto it = grants_.find(consumer);
    return it != grants_.end() && it->second.count(capability) != 0;
}

void Keystore::require(const std::string& consumer, Capability capability) const {
    if (!has_grant(consumer, capability)) {
        throw Error(Errc::PermissionDenied, consumer + " lacks the " +
                                                capability_name(capability) + " capability");
    }
}

Bytes Keystore::sign_tx(const std::string& consumer, const std::string& label,
                        const Bytes& message) const {
    require(consumer, Capability::SignTx);
    return crypto::ed25519_sign(secret(label), message);
}

Bytes Keystore::credential_key_bytes(const std::string& consumer,
                                     const std::string& label) const {
    require(consumer, Capability::SignCredential);
    return secret(label);
}

Bytes Keystore::export_key(const std::string& consumer, const std::string& label) const {
    require(consumer, Capability::Decrypt);
    return secret(label);
}

void Keystore::save(const std::string& path, const std::string& passphrase,
                    const KdfParams& cost) const {
    crypto::init();
    KdfParams kdf = cost;
    if (kdf.salt.size() != kSaltBytes) kdf.salt = crypto::system_rng().bytes(kSaltBytes);
    const Bytes key = derive_key(passphrase, kdf);
    const Bytes nonce = crypto::system_rng().bytes(kNonceBytes);

    json secrets = json::object();
    for (const auto& [label, bytes] : keys_) secrets[label] = base64url_encode(bytes);
    json payload;
    payload["keys"] = std::move(secrets);
    const std::string plaintext = payload.dump();

    json header = header_json(kKeystoreVersion, kdf, nonce, grants_to_json(grants_));
    const std::string ad = header.dump();

    Bytes sealed(plaintext.size() + crypto_aead_xchacha20poly1305_ietf_ABYTES);
    unsigned long long sealed_len = 0;
    crypto_aead_xchacha20poly1305_ietf_encrypt(
        sealed.data(), &sealed_len, reinterpret_cast<const uint8_t*>(plaintext.data()),
        plaintext.size(), reinterpret_cast<const uint8_t*>(ad.data()), ad.size(), nullptr,
        nonce.data(), key.data());
    sealed.resize(sealed_len);

    header["sealed"] = base64url_encode(sealed);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Internal, "cannot write keystore file " + path);
    out << header.dump(2) << "\n";
}

Keystore Keystore::load(const std::string& path, const std::string& passphrase) {
    crypto::init();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::NotFound, "no keystore file at " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();

    json header;
    try {
        header = json::parse(buffer.str());
    } catch (const json::exception& e) {
        throw Error(Errc::ParseError, std::string("keystore file is not valid JSON: ") + e.what());
    }

    Keystore store;
    KdfParams kdf;
    Bytes nonce;
    Bytes sealed;
    json grants;
    try {
        if (header.at("version").get<uint32_t>() != kKeystoreVersion) {
            throw Error(Errc::ParseError, "unsupported keystore version");
        }
        kdf.salt = base64url_decode(header.at("kdf").at("salt").get<std::string>());
        kdf.opslimit = header.at("kdf").at("ops").get<uint64_t>();
        kdf.memlimit = header.at("kdf").at("mem").get<uint64_t>();
        nonce = base64url_decode(header.at("nonce").get<std::string>());
        sealed = base64url_decode(header.at("sealed").get<std::string>());
        grants = header.at("grants");
        for (const auto& [consumer, capabilities] : grants.items()) {
            for (const auto& capability : capabilities) {
                store.grants_[consumer].insert(
                    capability_from_name(capability.get<std::string>()));
            }
        }
    } catch (const json::exception& e) {
        throw Error(Errc::ParseError, std::string("malformed keystore header: ") + e.what());
    }
    if (nonce.size() != kNonceBytes) {
        throw Error(Errc::ParseError, "malformed keystore nonce");
    }

    const Bytes key = derive_key(passphrase, kdf);
    const std::string ad = header_json(kKeystoreVersion, kdf, nonce, grants).dump();

    if (sealed.size() < crypto_aead_xchacha20poly1305_ietf_ABYTES) {
        throw Error(Errc::WrongPassphrase, "keystore authentication failed");
    }
    Bytes plaintext(sealed.size() - crypto_aead_xchacha20poly1305_ietf_ABYTES);
    unsigned long long plaintext_len = 0;
    if (crypto_aead_xchacha20poly1305_ietf_decrypt(
            plaintext.data(), &plaintext_len, nullptr, sealed.data(), sealed.size(),
            reinterpret_cast<const uint8_t*>(ad.data()), ad.size(), nonce.data(),
            key.data()) != 0) {
        // Covers both a wrong passphrase and a tampered file; the AEAD
        // cannot tell them apart and neither yields any plaintext.
        throw Error(Errc::WrongPassphrase, "keystore authentication failed");
    }
    plaintext.resize(plaintext_len);

    try {
        const json payload = json::parse(plaintext.begin(), plaintext.end());
        for (const auto& [label, encoded] : payload.at("keys").items()) {
            store.keys_[label] = base64url_decode(encoded.get<std::string>());
        }
    } catch (const json::exception& e) {
        throw Error(Errc::ParseError, std::string("malformed keystore payload: ") + e.what());
    }
    return store;
}

}  // namespace permadid::keystore
