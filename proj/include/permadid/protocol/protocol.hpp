#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "permadid/arns/registry.hpp"
#include "permadid/bbs/bbs.hpp"
#include "permadid/crypto.hpp"
#include "permadid/did/did.hpp"
#include "permadid/vc/credentials.hpp"
#include "permadid/weave/store.hpp"

/// Three-phase identity flows: entity setup, credential issuance into a
/// holder wallet, and nonce-bound selective-disclosure verification. The
/// engine wires the weave, name registry, DID method and credential service
/// together; entities exchange only the messages a real deployment would
/// (documents and name records on the weave, credentials and presentations
/// off-chain).
namespace permadid::protocol {

enum class Role {
    Issuer,
    Holder,
    Verifier,
    ServiceProvider,
};

const char* role_name(Role role);
Role role_from_name(const std::string& name);  // throws ParseError

/// Most recent verifier nonces, capacity-bounded. consume() returns false
/// for a nonce the window still remembers, so a replayed presentation is
/// rejected while memory stays O(capacity).
class NonceTracker {
public:
    explicit NonceTracker(size_t capacity = 10000) : capacity_(capacity) {}

    bool consume(const Bytes& nonce);

    size_t size() const { return order_.size(); }
    size_t capacity() const { return capacity_; }

private:
    size_t capacity_;
    std::deque<std::string> order_;
    std::unordered_set<std::string> seen_;
};

/// One participant's full local state. Single-owner and mutable; the engine
/// never shares a profile between entities, it passes immutable credentials
/// and presentations instead.
struct EntityProfile {
    Role role = Role::Holder;
    crypto::Ed25519KeyPair auth_keypair;
    std::optional<bbs::KeyPair> bbs_keypair;  // issuers only
    did::Did did;
    std::optional<std::string> name;
    weave::TxId published_doc_tx;

    /// Key that registered the name. Name records chain to their first
    /// registrant's address, so this key survives auth-key refreshes.
    std::optional<crypto::Ed25519KeyPair> name_keypair;

    /// Holder wallet. Credentials live here, never on the weave.
    std::vector<vc::Credential> wallet;

    /// Verifier-side replay window.
    NonceTracker nonces;
};

inline constexpr size_t kNonceBytes = 32;

struct VerificationRequest {
    std::set<std::string> required_paths;
    Bytes nonce;  // kNonceBytes of verifier randomness
    did::Did verifier;
};

struct VerificationResult {
    bool accepted = false;
    vc::RejectReason reason = vc::RejectReason::None;
    std::string detail;
    /// Exactly the requested paths, in canonical path order. Empty unless
    /// accepted.
    std::vector<std::pair<std::string, vc::ClaimValue>> disclosed;
};

class ProtocolEngine {
public:
    ProtocolEngine(weave::WeaveStore& weave, arns::NameRegistry& names, did::DidMethod& dids,
                   vc::CredentialService& credentials, crypto::Rng& rng = crypto::system_rng())
        : weave_(weave), names_(names), dids_(dids), credentials_(credentials), rng_(rng) {}

    /// Keys, DID document publication and optional name registration, then
    /// one sealed block, so the entity resolves immediately. Issuers get a
    /// BBS keypair published in the document. Throws NameTaken when the
    /// name is already owned.
    EntityProfile setup_entity(Role role, const std::optional<std::string>& name = std::nullopt);

    /// Issues against the holder's current authentication key and appends
    /// the credential to the holder wallet. Issuance errors pass through
    /// and leave the wallet unchanged.
    vc::Credential run_issuance(const EntityProfile& issuer, EntityProfile& holder,
                                const vc::ClaimSet& claim_set,
                                const std::vector<vc::PredicateSpec>& predicates = {},
                                vc::Schema schema = vc::Schema::None,
                                std::optional<vc::DateValue> today = std::nullopt);

    /// Fresh single-use nonce bound to the verifier.
    VerificationRequest make_request(EntityProfile& verifier, std::set<std::string> required_paths);

    /// Holder side picks the first wallet credential covering the request
    /// and discloses exactly the required paths; verifier side burns the
    /// nonce, resolves the named parties and checks the proof. Throws
    /// NoMatchingCredential when the wallet cannot cover the request;
    /// cryptographic and replay failures come back as REJECT results.
    VerificationResult run_verification(EntityProfile& verifier, EntityProfile& holder,
                                        const VerificationRequest& request);

    /// Key rotation: a fresh authentication keypair and DID, the old
    /// document deactivated, the name re-pointed, and every wallet
    /// credential reissued by its issuer against the new key. Presentations
    /// made before and after share no DID string and no holder key bytes.
    EntityProfile refresh_identity(EntityProfile holder,
                                   const std::vector<const EntityProfile*>& issuers);

    weave::WeaveStore& weave() { return weave_; }
    arns::NameRegistry& names() { return names_; }
    did::DidMethod& dids() { return dids_; }
    vc::CredentialService& credentials() { return credentials_; }
    crypto::Rng& rng() { return rng_; }

private:
    weave::WeaveStore& weave_;
    arns::NameRegistry& names_;
    did::DidMethod& dids_;
    vc::CredentialService& credentials_;
    crypto::Rng& rng_;
};

/// First wallet credential whose canonical claims cover every path, or null.
const vc::Credential* find_covering_credential(const std::vector<vc::Credential>& wallet,
                                               const std::set<std::string>& required_paths);

}  // namespace permadid::protocol
