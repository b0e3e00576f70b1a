#include "permadid/did/did.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "permadid/bbs/bbs.hpp"
#include "permadid/errors.hpp"

namespace permadid::did {

namespace {

using nlohmann::json;

// Claim-schema field names that must never appear as keys in a DID document:
// identity data belongs in credentials, never on the public record.
const std::set<std::string_view> kClaimFieldDenylist = {
    "familyName", "firstNames", "dateOfBirth", "uniqueIdentifier",
    "age",        "birthDate",  "claims",      "credentialSubject",
};

void check_no_claim_fields(const json& j) {
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            if (kClaimFieldDenylist.count(key))
                throw Error(Errc::InvalidDocument,
                            "claim-schema field \"" + key + "\" is not allowed in a DID document");
            check_no_claim_fields(value);
        }
    } else if (j.is_array()) {
        for (const auto& item : j) check_no_claim_fields(item);
    }
}

std::string fragment_of(const std::string& method_id, const Did& doc_id) {
    std::string prefix = doc_id + "#";
    if (method_id.size() <= prefix.size() || method_id.compare(0, prefix.size(), prefix) != 0)
        return {};
    return method_id.substr(prefix.size());
}

std::string normalize_ref(const std::string& ref, const Did& doc_id) {
    if (!ref.empty() && ref.front() == '#') return ref;
    std::string prefix = doc_id + "#";
    if (ref.size() > prefix.size() && ref.compare(0, prefix.size(), prefix) == 0)
        return ref.substr(prefix.size() - 1);
    return {};
}

json document_json(const DidDocument& doc) {
    json j;
    j["@context"] = doc.context;
    j["id"] = doc.id;
    if (doc.controller) j["controller"] = *doc.controller;
    json methods = json::array();
    for (const VerificationMethod& m : doc.verification_methods)
        methods.push_back({{"id", m.id},
                           {"type", m.type_label},
                           {"controller", m.controller},
                           {"publicKeyBase58", base58_encode(m.public_key)}});
    j["verificationMethod"] = methods;
    j["authentication"] = doc.authentication;
    if (!doc.services.empty()) {
        json services = json::array();
        for (const ServiceEndpoint& s : doc.services)
            services.push_back({{"id", s.id}, {"type", s.type}, {"serviceEndpoint", s.endpoint}});
        j["service"] = services;
    }
    j["versionSequence"] = doc.version_sequence;
    if (doc.deactivated) j["deactivated"] = true;
    return j;
}

}  // namespace

bool is_did(std::string_view s) {
    if (s.size() != kDidPrefix.size() + 43) return false;
    if (s.substr(0, kDidPrefix.size()) != kDidPrefix) return false;
    return is_base64url(s.substr(kDidPrefix.size()));
}

std::string method_specific_id(const Did& d) {
    if (!is_did(d)) throw Error(Errc::ParseError, "not a did:arweave identifier: " + d);
    return d.substr(kDidPrefix.size());
}

Did derive_did(const Bytes& public_key) {
    if (!crypto::ed25519_valid_pubkey(public_key))
        throw Error(Errc::InvalidKey, "authentication key is not a valid Ed25519 public key");
    return std::string(kDidPrefix) + crypto::key_address(public_key);
}

const VerificationMethod* DidDocument::find_method(std::string_view fragment) const {
    std::string full = id + "#" + std::string(fragment);
    for (const VerificationMethod& m : verification_methods)
        if (m.id == full) return &m;
    return nullptr;
}

DidDocument create_document(const SubjectKeys& keys,
                            const std::vector<ServiceEndpoint>& services,
                            const std::optional<Did>& controller) {
    if (keys.auth_public_key.empty())
        throw Error(Errc::NoAuthenticationKey, "a document needs at least one authentication key");
    DidDocument doc;
    doc.context = {std::string(kDidContext)};
    doc.id = derive_did(keys.auth_public_key);
    doc.controller = controller;
    doc.verification_methods.push_back({doc.id + "#" + std::string(kAuthFragment),
                                        std::string(kAuthKeyType), doc.id,
                                        keys.auth_public_key});
    doc.authentication = {"#" + std::string(kAuthFragment)};
    if (keys.bbs_public_key)
        doc.verification_methods.push_back({doc.id + "#" + std::string(kBbsFragment),
                                            std::string(kBbsKeyType), doc.id,
                                            *keys.bbs_public_key});
    doc.services = services;
    for (size_t i = 0; i < doc.services.size(); ++i)
        if (doc.services[i].id.empty())
            doc.services[i].id = doc.id + "#svc-" + std::to_string(i);
    doc.version_sequence = 0;
    validate_document(doc);
    return doc;
}

void validate_document(const DidDocument& doc) {
    auto bad = [](const std::string& what) -> Error {
        return Error(Errc::InvalidDocument, what);
    };
    if (std::find(doc.context.begin(), doc.context.end(), kDidContext) == doc.context.end())
        throw bad("@context must include " + std::string(kDidContext));
    if (!is_did(doc.id)) throw bad("id is not a did:arweave identifier");
    if (doc.controller && !is_did(*doc.controller)) throw bad("controller is not a DID");

    if (doc.verification_methods.empty()) throw bad("no verification methods");
    std::set<std::string> fragments;
    for (const VerificationMethod& m : doc.verification_methods) {
        std::string frag = fragment_of(m.id, doc.id);
        if (frag.empty())
            throw bad("verification method id must be <doc id>#<fragment>: " + m.id);
        if (!fragments.insert(frag).second) throw bad("duplicate method fragment #" + frag);
        if (!is_did(m.controller)) throw bad("method #" + frag + " has no controller DID");
        if (m.type_label == kAuthKeyType) {
            if (!crypto::ed25519_valid_pubkey(m.public_key))
                throw bad("method #" + frag + " is not a valid Ed25519 key");
        } else if (m.type_label == kBbsKeyType) {
            if (!bbs::parse_public_key(m.public_key))
                throw bad("method #" + frag + " is not a valid BBS key");
        } else {
            throw bad("unknown verification method type " + m.type_label);
        }
    }

    if (doc.authentication.empty()) throw bad("no authentication references");
    for (const std::string& ref : doc.authentication) {
        std::string norm = normalize_ref(ref, doc.id);
        if (norm.empty() || !doc.find_method(norm.substr(1)))
            throw bad("authentication reference " + ref + " has no matching method");
        if (doc.find_method(norm.substr(1))->type_label != kAuthKeyType)
            throw bad("authentication reference " + ref + " must name an Ed25519 method");
    }

    // The DID itself is the content address of the primary authentication key.
    std::string primary = normalize_ref(doc.authentication.front(), doc.id).substr(1);
    const VerificationMethod* auth = doc.find_method(primary);
    if (crypto::key_address(auth->public_key) != method_specific_id(doc.id))
        throw bad("id is not the content hash of the primary authentication key");

    for (const ServiceEndpoint& s : doc.services)
        if (s.id.empty() || s.type.empty() || s.endpoint.empty())
            throw bad("service entries need id, type and endpoint");

    check_no_claim_fields(document_json(doc));
}

std::string document_to_json(const DidDocument& doc) { return document_json(doc).dump(); }

DidDocument document_from_json(std::string_view text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw Error(Errc::ParseError, "DID document is not a JSON object");
    check_no_claim_fields(j);
    DidDocument doc;
    try {
        doc.context = j.at("@context").get<std::vector<std::string>>();
        doc.id = j.at("id").get<std::string>();
        if (j.contains("controller")) doc.controller = j.at("controller").get<std::string>();
        for (const json& m : j.at("verificationMethod")) {
            VerificationMethod vm;
            vm.id = m.at("id").get<std::string>();
            vm.type_label = m.at("type").get<std::string>();
            vm.controller = m.at("controller").get<std::string>();
            vm.public_key = base58_decode(m.at("publicKeyBase58").get<std::string>());
            doc.verification_methods.push_back(std::move(vm));
        }
        doc.authentication = j.at("authentication").get<std::vector<std::string>>();
        if (j.contains("service"))
            for (const json& s : j.at("service"))
                doc.services.push_back({s.at("id").get<std::string>(),
                                        s.at("type").get<std::string>(),
                                        s.at("serviceEndpoint").get<std::string>()});
        doc.version_sequence = j.at("versionSequence").get<uint64_t>();
        doc.deactivated = j.value("deactivated", false);
    } catch (const json::exception& e) {
        throw Error(Errc::ParseError, std::string("DID document: ") + e.what());
    }
    validate_document(doc);
    return doc;
}

weave::TxId DidMethod::publish(const DidDocument& doc, const crypto::Ed25519KeyPair& signing_key) {
    validate_document(doc);
    std::string expected = method_specific_id(doc.controller.value_or(doc.id));
    if (signing_key.address() != expected)
        throw Error(Errc::InvalidDocument,
                    "publication must be signed by the controller key for " + expected);
    return weave_.submit(signing_key.address(),
                         {{"Content-Type", "application/json"},
                          {"DID-Type", "did-document"},
                          {"DID", doc.id}},
                         to_bytes(document_to_json(doc)));
}

DidDocument DidMethod::resolve(const std::string& ref) const {
    if (is_did(ref)) return resolve_did(ref);
    if (arns::valid_name(ref)) return resolve_name(ref);
    throw Error(Errc::NotFound, "neither a DID nor a registrable name: " + ref);
}

DidDocument DidMethod::resolve_did(const Did& d) const {
    std::vector<weave::TxId> candidates = weave_.query({{"DID", d}});  // seal order
    std::optional<std::string> trusted;  // publisher address fixed by the first valid version
    std::optional<DidDocument> best;
    weave::TxId best_tx;
    for (const weave::TxId& id : candidates) {
        weave::Transaction tx = weave_.get(id);
        DidDocument doc;
        try {
            doc = document_from_json(to_string(tx.data));
        } catch (const Error&) {
            continue;  // injected garbage never influences resolution
        }
        if (doc.id != d) continue;
        if (tx.owner != method_specific_id(doc.controller.value_or(doc.id)))
            continue;  // untrusted update: publisher is not the stated controller
        if (!trusted) trusted = tx.owner;
        if (tx.owner != *trusted) continue;  // controller cannot be hijacked mid-chain
        if (!best || doc.version_sequence > best->version_sequence ||
            (doc.version_sequence == best->version_sequence && id < best_tx)) {
            best = std::move(doc);
            best_tx = id;
        }
    }
    if (!best) throw Error(Errc::NotFound, "no trusted document for " + d);
    return *best;
}

DidDocument DidMethod::resolve_name(const std::string& name) const {
    auto [target, record] = names_.resolve(name);
    weave::Transaction tx = weave_.get(target);
    return document_from_json(to_string(tx.data));  // ParseError if not a document
}

}  // namespace permadid::did
