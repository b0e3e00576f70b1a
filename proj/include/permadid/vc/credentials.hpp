#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "permadid/bbs/bbs.hpp"
#include "permadid/bytes.hpp"
#include "permadid/crypto.hpp"
#include "permadid/did/did.hpp"
#include "permadid/weave/store.hpp"

namespace permadid::vc {

inline constexpr std::string_view kCredentialContext = "https://www.w3.org/2018/credentials/v1";
inline constexpr std::string_view kCredentialType = "VerifiableCredential";
inline constexpr std::string_view kProofType = "BbsBlsSignature2020";
inline constexpr std::string_view kProofPurpose = "assertionMethod";
inline constexpr std::string_view kCredentialIdPrefix = "urn:permadid:";

/// Claim path carrying the holder's authentication public key; written by
/// issuance, never by callers.
inline constexpr std::string_view kHolderKeyPath = "publicKey";

/// Calendar date. The text form is "YYYY-MM-DD" and must name a real day.
struct DateValue {
    std::string iso;
    auto operator<=>(const DateValue&) const = default;
};

bool is_date_string(std::string_view text);

/// Scalar claim value. Strings shaped like a calendar date normalize to
/// DateValue on entry, so a value has exactly one representation.
using ClaimValue = std::variant<std::string, int64_t, bool, DateValue>;

/// Flat path -> scalar map in insertion order. Canonicalization, not entry
/// order, decides message indexes.
struct ClaimSet {
    did::Did subject_id;
    std::vector<std::pair<std::string, ClaimValue>> claims;

    void add(const std::string& path, ClaimValue value);    // throws DuplicatePath
    void set(const std::string& path, ClaimValue value);    // upsert
    const ClaimValue* find(const std::string& path) const;  // null when absent
    bool has(const std::string& path) const { return find(path) != nullptr; }
};

/// Text form without the type tag: "Alice", "25", "true", "1998-03-14".
std::string value_text(const ClaimValue& value);

/// Tagged canonical form: "s:Alice", "i:25", "b:true", "d:1998-03-14". The
/// tag keeps decode unambiguous; string payloads are raw bytes, so any
/// value roundtrips bit-exact.
std::string canonical_value(const ClaimValue& value);

/// One signed message: bytes of "path=canonical-value". Paths never contain
/// '=', so the first '=' splits unambiguously.
Bytes encode_claim(const std::string& path, const ClaimValue& value);
std::pair<std::string, ClaimValue> decode_claim(const Bytes& message);

struct CanonicalClaims {
    std::vector<std::pair<std::string, Bytes>> messages;  // sorted by path byte order
    std::map<std::string, size_t> index_map;              // path -> message index
};

/// Deterministic message vector: paths sorted by UTF-8 byte order. Tests and
/// verifiers address claims through index_map, never fixed positions.
CanonicalClaims canonicalize(const ClaimSet& claim_set);

std::string claim_set_to_json(const ClaimSet& claim_set);
ClaimSet claim_set_from_json(const std::string& json);

enum class Schema {
    None,
    EidasNaturalPerson,  // familyName, firstNames, dateOfBirth, uniqueIdentifier
    EidasLegalPerson,    // legalName, uniqueIdentifier
};

/// Throws SchemaViolation naming the first missing mandatory path.
void validate_schema(const ClaimSet& claim_set, Schema schema);

struct ProofBlock {
    std::string type_label;           // "BbsBlsSignature2020"
    std::string created;              // RFC 3339
    std::string proof_purpose;        // "assertionMethod"
    std::string verification_method;  // issuer DID + "#" + key fragment
    Bytes proof_value;                // multi-message signature bytes
};

struct Credential {
    std::vector<std::string> context;
    std::string id;  // "urn:permadid:" + content hash
    std::vector<std::string> type_labels;
    did::Did issuer;
    std::string issuance_date;
    ClaimSet credential_subject;  // includes the holder key claim
    ProofBlock proof;
};

std::string credential_to_json(const Credential& credential);
Credential credential_from_json(const std::string& json);

/// Content-addressed credential id over issuer, subject and issuance date.
std::string mint_credential_id(const did::Did& issuer, const ClaimSet& subject,
                               const std::string& issuance_date);

/// Header the signature binds: credential id and issuer DID.
Bytes credential_header(const std::string& credential_id, const did::Did& issuer);

/// Verifier-facing context appended to the nonce in presentation headers.
Bytes make_presentation_header(const Bytes& verifier_nonce);

struct DisclosedClaim {
    size_t index;  // message index under canonical ordering
    std::string path;
    ClaimValue value;
};

struct Presentation {
    std::string credential_id;
    did::Did issuer;
    std::vector<DisclosedClaim> disclosed;  // strictly increasing indexes
    Bytes proof;
    Bytes presentation_header;  // verifier nonce || context
    size_t total_message_count = 0;
};

std::string presentation_to_json(const Presentation& presentation);
Presentation presentation_from_json(const std::string& json);

enum class RejectReason { None, BadProof, NonceMismatch, Revoked, UnresolvableIssuer };
const char* reject_reason_name(RejectReason reason);

struct VerificationOutcome {
    bool accepted = false;
    RejectReason reason = RejectReason::None;
    std::string detail;
};

enum class PredicateOp { GreaterOrEqual, LessOrEqual, InSet };

/// Issuer-computed boolean claim derived from a source claim at issuance
/// time. The bound is inclusive: age 18 satisfies "age >= 18".
struct PredicateSpec {
    std::string source_path;
    PredicateOp op = PredicateOp::GreaterOrEqual;
    int64_t bound = 0;                    // GreaterOrEqual / LessOrEqual
    std::vector<std::string> member_set;  // InSet
    std::string output_path;              // derived from the spec when empty
};

std::string derive_output_path(const PredicateSpec& spec);

/// Completed years between two calendar dates.
int64_t age_on(const DateValue& date_of_birth, const DateValue& today);

/// Evaluate a predicate over the claim set. A GreaterOrEqual/LessOrEqual
/// predicate whose source path is "age" falls back to the completed years
/// from dateOfBirth when no "age" claim exists.
bool evaluate_predicate(const ClaimSet& claim_set, const PredicateSpec& spec,
                        const DateValue& today);

struct RevocationList {
    did::Did issuer;
    std::set<std::string> revoked;  // credential ids
    uint64_t sequence = 0;
    Bytes signature;  // by the issuer's authentication key
};

Bytes revocation_signing_bytes(const did::Did& issuer, const std::set<std::string>& revoked,
                               uint64_t sequence);
std::string revocation_to_json(const RevocationList& list);
RevocationList revocation_from_json(const std::string& json);

std::string rfc3339_utc_now();
DateValue utc_today();

/// Issuance, presentation, verification and revocation over a weave-backed
/// identity layer. Pure reads plus explicit publications; safe to share
/// across reader threads.
class CredentialService {
public:
    CredentialService(weave::WeaveStore& weave, did::DidMethod& dids)
        : weave_(weave), dids_(dids) {}

    Credential issue(const bls12::Fr& issuer_sk, const did::Did& issuer_did,
                     const did::Did& holder_did, const Bytes& holder_pubkey,
                     const ClaimSet& claim_set, Schema schema = Schema::None);

    Credential issue_with_predicates(const bls12::Fr& issuer_sk, const did::Did& issuer_did,
                                     const did::Did& holder_did, const Bytes& holder_pubkey,
                                     const ClaimSet& claim_set,
                                     const std::vector<PredicateSpec>& predicates,
                                     Schema schema = Schema::None,
                                     std::optional<DateValue> today = std::nullopt);

    /// Full signature check against the issuer's published key.
    bool verify_credential(const Credential& credential);

    Presentation present(const Credential& credential, const std::set<std::string>& disclose_paths,
                         const Bytes& verifier_nonce, crypto::Rng& rng = crypto::system_rng());

    /// Never throws; the outcome carries the reject reason.
    VerificationOutcome verify_presentation(const Presentation& presentation,
                                            const Bytes& expected_nonce);

    /// Publishes a new revocation list and seals it, so the revocation is
    /// visible to verifiers at return.
    weave::TxId revoke(const crypto::Ed25519KeyPair& issuer_auth, const did::Did& issuer,
                       const std::string& credential_id);

    bool is_revoked(const did::Did& issuer, const std::string& credential_id);

    /// Highest-sequence revocation list with a valid issuer signature.
    std::optional<RevocationList> latest_revocation(const did::Did& issuer);

private:
    Bytes resolve_bbs_key(const did::Did& issuer);  // throws UnresolvableIssuer
    Credential sign_subject(const bls12::Fr& issuer_sk, const did::Did& issuer_did,
                            ClaimSet subject);

    weave::WeaveStore& weave_;
    did::DidMethod& dids_;
};

}  // namespace permadid::vc
