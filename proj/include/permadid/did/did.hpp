#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "permadid/arns/registry.hpp"
#include "permadid/bytes.hpp"
#include "permadid/crypto.hpp"
#include "permadid/weave/store.hpp"

namespace permadid::did {

/// String form "did:arweave:" + 43-char base64url, where the id part is the
/// content hash of the subject's primary authentication key.
using Did = std::string;

inline constexpr std::string_view kDidPrefix = "did:arweave:";
inline constexpr std::string_view kDidContext = "https://www.w3.org/ns/did/v1";
inline constexpr std::string_view kAuthKeyType = "Ed25519VerificationKey2018";
inline constexpr std::string_view kBbsKeyType = "Bls12381G2Key2020";
inline constexpr std::string_view kAuthFragment = "keys-1";
inline constexpr std::string_view kBbsFragment = "bbs-1";

bool is_did(std::string_view s);
std::string method_specific_id(const Did& d);  // the 43-char address part

/// Deterministic DID from an Ed25519 authentication key.
Did derive_did(const Bytes& public_key);  // throws InvalidKey

struct VerificationMethod {
    std::string id;  // did + "#" + fragment
    std::string type_label;
    Did controller;
    Bytes public_key;  // JSON form carries publicKeyBase58
};

struct ServiceEndpoint {
    std::string id;
    std::string type;
    std::string endpoint;
};

struct DidDocument {
    std::vector<std::string> context;
    Did id;
    std::optional<Did> controller;  // defaults to the subject itself
    std::vector<VerificationMethod> verification_methods;
    std::vector<std::string> authentication;  // relative "#fragment" references
    std::vector<ServiceEndpoint> services;
    uint64_t version_sequence = 0;
    bool deactivated = false;

    const VerificationMethod* find_method(std::string_view fragment) const;
};

struct SubjectKeys {
    Bytes auth_public_key;                // Ed25519, required
    std::optional<Bytes> bbs_public_key;  // issuers publish a BBS method too
};

/// Builds a version-0 document: the auth key as "#keys-1" (listed for
/// authentication), an optional BBS method as "#bbs-1", and any services.
DidDocument create_document(const SubjectKeys& keys,
                            const std::vector<ServiceEndpoint>& services = {},
                            const std::optional<Did>& controller = std::nullopt);

/// Structural validation: DID v1 context, id bound to the primary auth key,
/// resolvable authentication references, well-typed keys, and no
/// claim-schema field names anywhere in the JSON form.
void validate_document(const DidDocument& doc);  // throws InvalidDocument

/// Canonical JSON: sorted keys, UTF-8, no insignificant whitespace.
std::string document_to_json(const DidDocument& doc);
DidDocument document_from_json(std::string_view json);  // ParseError | InvalidDocument

/// Publication and resolution over the weave. Updates are republications
/// with a higher versionSequence; only transactions submitted from the
/// controller's address count at resolution time.
class DidMethod {
public:
    DidMethod(weave::WeaveStore& weave, arns::NameRegistry& names)
        : weave_(weave), names_(names) {}

    /// Stores the document, owned by the signing key's address, under tags
    /// Content-Type/DID-Type/DID. The signing key must be the controller's
    /// (or the subject's, when no controller is set).
    weave::TxId publish(const DidDocument& doc, const crypto::Ed25519KeyPair& signing_key);

    /// Accepts a DID or a registered name.
    DidDocument resolve(const std::string& ref) const;

    /// Highest trusted sealed version; ties break toward the smallest
    /// transaction id. Versions from other publishers are skipped.
    DidDocument resolve_did(const Did& d) const;

    /// Name resolution: the registry target must parse as a document.
    DidDocument resolve_name(const std::string& name) const;

    arns::NameRegistry& names() { return names_; }
    weave::WeaveStore& weave() { return weave_; }

private:
    weave::WeaveStore& weave_;
    arns::NameRegistry& names_;
};

}  // namespace permadid::did
