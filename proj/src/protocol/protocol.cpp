#include "permadid/protocol/protocol.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "permadid/errors.hpp"

namespace permadid::protocol {

const char* role_name(Role role) {
    switch (role) {
        case Role::Issuer: return "issuer";
        case Role::Holder: return "holder";
        case Role::Verifier: return "verifier";
        case Role::ServiceProvider: return "service_provider";
    }
    return "holder";
}

Role role_from_name(const std::string& name) {
    if (name == "issuer") return Role::Issuer;
    if (name == "holder") return Role::Holder;
    if (name == "verifier") return Role::Verifier;
    if (name == "service_provider") return Role::ServiceProvider;
    throw Error(Errc::ParseError, "unknown role: " + name);
}

bool NonceTracker::consume(const Bytes& nonce) {
    std::string key(nonce.begin(), nonce.end());
    if (seen_.count(key) != 0) return false;
    seen_.insert(key);
    order_.push_back(std::move(key));
    while (order_.size() > capacity_) {
        seen_.erase(order_.front());
        order_.pop_front();
    }
    return true;
}

const vc::Credential* find_covering_credential(const std::vector<vc::Credential>& wallet,
                                               const std::set<std::string>& required_paths) {
    for (const auto& credential : wallet) {
        const vc::CanonicalClaims canonical = vc::canonicalize(credential.credential_subject);
        bool covers = true;
        for (const auto& path : required_paths) {
            if (canonical.index_map.count(path) == 0) {
                covers = false;
                break;
            }
        }
        if (covers) return &credential;
    }
    return nullptr;
}

EntityProfile ProtocolEngine::setup_entity(Role role, const std::optional<std::string>& name) {
    EntityProfile profile;
    profile.role = role;
    profile.auth_keypair = crypto::Ed25519KeyPair::from_seed(rng_.bytes(32));
    if (role == Role::Issuer) profile.bbs_keypair = bbs::KeyPair::generate(rng_);

    did::SubjectKeys keys{profile.auth_keypair.public_key, std::nullopt};
    if (profile.bbs_keypair) keys.bbs_public_key = profile.bbs_keypair->public_key;
    const did::DidDocument doc = did::create_document(keys);
    profile.did = doc.id;
    profile.published_doc_tx = dids_.publish(doc, profile.auth_keypair);

    if (name) {
        names_.register_name(*name, profile.published_doc_tx, profile.auth_keypair);
        profile.name = *name;
        profile.name_keypair = profile.auth_keypair;
    }
    weave_.mine_block();
    return profile;
}

vc::Credential ProtocolEngine::run_issuance(const EntityProfile& issuer, EntityProfile& holder,
                                            const vc::ClaimSet& claim_set,
                                            const std::vector<vc::PredicateSpec>& predicates,
                                            vc::Schema schema, std::optional<vc::DateValue> today) {
    if (!issuer.bbs_keypair) {
        throw Error(Errc::NotIssuer, "entity has no credential signing key");
    }
    vc::Credential credential = credentials_.issue_with_predicates(
        issuer.bbs_keypair->secret, issuer.did, holder.did, holder.auth_keypair.public_key,
        claim_set, predicates, schema, std::move(today));
    holder.wallet.push_back(credential);
    return credential;
}

VerificationRequest ProtocolEngine::make_request(EntityProfile& verifier,
                                                 std::set<std::string> required_paths) {
    VerificationRequest request;
    request.required_paths = std::move(required_paths);
    request.nonce = rng_.bytes(kNonceBytes);
    request.verifier = verifier.did;
    return request;
}

VerificationResult ProtocolEngine::run_verification(EntityProfile& verifier,
                                                    EntityProfile& holder,
                                                    const VerificationRequest& request) {
    const vc::Credential* credential =
        find_covering_credential(holder.wallet, request.required_paths);
    if (credential == nullptr) {
        throw Error(Errc::NoMatchingCredential, "wallet has no credential covering the request");
    }
    const vc::Presentation presentation =
        credentials_.present(*credential, request.required_paths, request.nonce, rng_);

    VerificationResult result;

    // The verifier burns the nonce before looking at the proof, so a nonce
    // never yields two accepts even when the first attempt failed.
    if (!verifier.nonces.consume(request.nonce)) {
        result.reason = vc::RejectReason::NonceMismatch;
        result.detail = "nonce already used";
        return result;
    }

    if (holder.name) {
        try {
            const did::DidDocument holder_doc = dids_.resolve_name(*holder.name);
            if (holder_doc.deactivated) {
                result.reason = vc::RejectReason::UnresolvableIssuer;
                result.detail = "holder document deactivated";
                return result;
            }
        } catch (const Error& e) {
            result.reason = vc::RejectReason::UnresolvableIssuer;
            result.detail = std::string("holder unresolvable: ") + e.what();
            return result;
        }
    }

    const vc::VerificationOutcome outcome =
        credentials_.verify_presentation(presentation, request.nonce);
    if (!outcome.accepted) {
        result.reason = outcome.reason;
        result.detail = outcome.detail;
        return result;
    }

    std::set<std::string> disclosed_paths;
    for (const auto& claim : presentation.disclosed) disclosed_paths.insert(claim.path);
    if (disclosed_paths != request.required_paths) {
        result.reason = vc::RejectReason::BadProof;
        result.detail = "disclosed paths differ from the request";
        return result;
    }

    result.accepted = true;
    for (const auto& claim : presentation.disclosed) {
        result.disclosed.emplace_back(claim.path, claim.value);
    }
    return result;
}

EntityProfile ProtocolEngine::refresh_identity(EntityProfile holder,
                                               const std::vector<const EntityProfile*>& issuers) {
    EntityProfile fresh;
    fresh.role = holder.role;
    fresh.auth_keypair = crypto::Ed25519KeyPair::from_seed(rng_.bytes(32));
    if (holder.bbs_keypair) fresh.bbs_keypair = bbs::KeyPair::generate(rng_);
    fresh.name = holder.name;
    fresh.name_keypair = holder.name_keypair;
    fresh.nonces = std::move(holder.nonces);

    did::SubjectKeys keys{fresh.auth_keypair.public_key, std::nullopt};
    if (fresh.bbs_keypair) keys.bbs_public_key = fresh.bbs_keypair->public_key;
    const did::DidDocument doc = did::create_document(keys);
    fresh.did = doc.id;
    fresh.published_doc_tx = dids_.publish(doc, fresh.auth_keypair);

    // Retire the old identity on-weave before anything references the new
    // one: deactivate the old document and re-point the name.
    did::DidDocument old_doc = dids_.resolve_did(holder.did);
    old_doc.deactivated = true;
    old_doc.version_sequence += 1;
    dids_.publish(old_doc, holder.auth_keypair);

    if (fresh.name) {
        if (!fresh.name_keypair) {
            throw Error(Errc::Internal, "named profile lost its name registration key");
        }
        names_.update(*fresh.name, fresh.published_doc_tx, *fresh.name_keypair);
    }
    weave_.mine_block();

    for (const auto& credential : holder.wallet) {
        const EntityProfile* issuer = nullptr;
        for (const EntityProfile* candidate : issuers) {
            if (candidate != nullptr && candidate->did == credential.issuer) {
                issuer = candidate;
                break;
            }
        }
        if (issuer == nullptr || !issuer->bbs_keypair) {
            throw Error(Errc::UnresolvableIssuer,
                        "no issuer profile can reissue " + credential.id);
        }
        vc::ClaimSet claims;
        claims.subject_id = fresh.did;
        for (const auto& [path, value] : credential.credential_subject.claims) {
            if (path == vc::kHolderKeyPath) continue;  // rebound to the new key at issue
            claims.add(path, value);
        }
        fresh.wallet.push_back(credentials_.issue(issuer->bbs_keypair->secret, issuer->did,
                                                  fresh.did, fresh.auth_keypair.public_key,
                                                  claims));
    }
    return fresh;
}

}  // namespace permadid::protocol
