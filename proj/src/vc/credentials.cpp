#include "permadid/vc/credentials.hpp"

#include <algorithm>
#include <charconv>
#include <ctime>

#include <json.hpp>

#include "permadid/errors.hpp"

namespace permadid::vc {

namespace {

constexpr std::string_view kHeaderContext = "permadid-vc-header-v1";
constexpr std::string_view kIdContext = "permadid-credential-v1";
constexpr std::string_view kPresentationContext = "permadid-presentation-v1";
constexpr std::string_view kRevocationContext = "permadid-revocation-v1";
constexpr std::string_view kRevocationTag = "Revocation-Issuer";

// "id" is the subject identifier slot in credentialSubject JSON, so it can
// never name a claim.
bool valid_path(std::string_view path) {
    if (path.empty() || path.size() > 128 || path == "id") return false;
    for (unsigned char c : path)
        if (c == '=' || c < 0x20) return false;
    return true;
}

void check_path(const std::string& path) {
    if (!valid_path(path))
        throw Error(Errc::ParseError,
                    "claim path must be 1..128 bytes, not \"id\", without '=' or control "
                    "characters: " +
                        path);
}

// Date-shaped strings have exactly one representation: DateValue.
ClaimValue normalize(ClaimValue value) {
    if (const auto* s = std::get_if<std::string>(&value); s && is_date_string(*s))
        return DateValue{*s};
    if (const auto* d = std::get_if<DateValue>(&value); d && !is_date_string(d->iso))
        throw Error(Errc::NonScalarValue, "not a calendar date: " + d->iso);
    return value;
}

void put_lp(Bytes& out, std::string_view text) {
    for (int i = 7; i >= 0; --i) out.push_back(uint8_t(text.size() >> (8 * i)));
    out.insert(out.end(), text.begin(), text.end());
}

void hash_lp(crypto::Sha256Stream& h, std::string_view text) {
    h.update_u64(text.size());
    h.update(text);
}

nlohmann::json value_to_json(const ClaimValue& value) {
    if (const auto* s = std::get_if<std::string>(&value)) return *s;
    if (const auto* i = std::get_if<int64_t>(&value)) return *i;
    if (const auto* b = std::get_if<bool>(&value)) return *b;
    return std::get<DateValue>(value).iso;
}

ClaimValue value_from_json(const nlohmann::json& j) {
    if (j.is_string()) return normalize(j.get<std::string>());
    if (j.is_boolean()) return j.get<bool>();
    if (j.is_number_unsigned()) {
        uint64_t u = j.get<uint64_t>();
        if (u > uint64_t(INT64_MAX))
            throw Error(Errc::NonScalarValue, "integer claim out of range");
        return int64_t(u);
    }
    if (j.is_number_integer()) return j.get<int64_t>();
    throw Error(Errc::NonScalarValue, "claim values must be string, integer, boolean or date");
}

const nlohmann::json& field(const nlohmann::json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) throw Error(Errc::ParseError, std::string("missing field: ") + name);
    return *it;
}

std::string str_field(const nlohmann::json& j, const char* name) {
    const auto& f = field(j, name);
    if (!f.is_string()) throw Error(Errc::ParseError, std::string("field not a string: ") + name);
    return f.get<std::string>();
}

nlohmann::json parse_object(const std::string& json, const char* what) {
    nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw Error(Errc::ParseError, std::string(what) + " is not a JSON object");
    return j;
}

// Primary authentication key of a resolved document; the document validator
// guarantees the reference resolves to an Ed25519 method.
const Bytes& auth_key_of(const did::DidDocument& doc) {
    std::string ref = doc.authentication.front();
    std::string fragment = ref.substr(ref.find('#') + 1);
    return doc.find_method(fragment)->public_key;
}

}  // namespace

bool is_date_string(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
    for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (text[i] < '0' || text[i] > '9') return false;
    int year = (text[0] - '0') * 1000 + (text[1] - '0') * 100 + (text[2] - '0') * 10 + text[3] - '0';
    int month = (text[5] - '0') * 10 + text[6] - '0';
    int day = (text[8] - '0') * 10 + text[9] - '0';
    if (month < 1 || month > 12 || day < 1) return false;
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return day <= kDays[month - 1] + (month == 2 && leap ? 1 : 0);
}

void ClaimSet::add(const std::string& path, ClaimValue value) {
    check_path(path);
    if (has(path)) throw Error(Errc::DuplicatePath, path);
    claims.emplace_back(path, normalize(std::move(value)));
}

void ClaimSet::set(const std::string& path, ClaimValue value) {
    check_path(path);
    for (auto& [p, v] : claims)
        if (p == path) {
            v = normalize(std::move(value));
            return;
        }
    claims.emplace_back(path, normalize(std::move(value)));
}

const ClaimValue* ClaimSet::find(const std::string& path) const {
    for (const auto& [p, v] : claims)
        if (p == path) return &v;
    return nullptr;
}

std::string value_text(const ClaimValue& value) {
    if (const auto* s = std::get_if<std::string>(&value)) return *s;
    if (const auto* i = std::get_if<int64_t>(&value)) return std::to_string(*i);
    if (const auto* b = std::get_if<bool>(&value)) return *b ? "true" : "false";
    return std::get<DateValue>(value).iso;
}

std::string canonical_value(const ClaimValue& value) {
    static constexpr char kTag[] = {'s', 'i', 'b', 'd'};
    return std::string(1, kTag[value.index()]) + ":" + value_text(value);
}

Bytes encode_claim(const std::string& path, const ClaimValue& value) {
    check_path(path);
    std::string text = path + "=" + canonical_value(normalize(value));
    return to_bytes(text);
}

std::pair<std::string, ClaimValue> decode_claim(const Bytes& message) {
    std::string text = to_string(message);
    size_t eq = text.find('=');
    if (eq == std::string::npos) throw Error(Errc::ParseError, "claim message lacks '='");
    std::string path = text.substr(0, eq);
    check_path(path);
    if (text.size() < eq + 3 || text[eq + 2] != ':')
        throw Error(Errc::ParseError, "claim message lacks a type tag");
    std::string payload = text.substr(eq + 3);
    switch (text[eq + 1]) {
        case 's':
            return {path, normalize(payload)};
        case 'i': {
            int64_t v = 0;
            auto [end, ec] = std::from_chars(payload.data(), payload.data() + payload.size(), v);
            if (ec != std::errc() || end != payload.data() + payload.size())
                throw Error(Errc::ParseError, "bad integer claim: " + payload);
            return {path, v};
        }
        case 'b':
            if (payload == "true") return {path, true};
            if (payload == "false") return {path, false};
            throw Error(Errc::ParseError, "bad boolean claim: " + payload);
        case 'd':
            if (!is_date_string(payload))
                throw Error(Errc::ParseError, "bad date claim: " + payload);
            return {path, DateValue{payload}};
        default:
            throw Error(Errc::ParseError, "unknown claim type tag");
    }
}

CanonicalClaims canonicalize(const ClaimSet& claim_set) {
    auto entries = claim_set.claims;
    for (auto& [path, value] : entries) {
        check_path(path);
        value = normalize(std::move(value));
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    CanonicalClaims out;
    for (auto& [path, value] : entries) {
        if (!out.messages.empty() && out.messages.back().first == path)
            throw Error(Errc::DuplicatePath, path);
        out.index_map.emplace(path, out.messages.size());
        out.messages.emplace_back(path, encode_claim(path, value));
    }
    return out;
}

std::string claim_set_to_json(const ClaimSet& claim_set) {
    nlohmann::json j = nlohmann::json::object();
    j["id"] = claim_set.subject_id;
    for (const auto& [path, value] : claim_set.claims) j[path] = value_to_json(value);
    return j.dump();
}

ClaimSet claim_set_from_json(const std::string& json) {
    nlohmann::json j = parse_object(json, "claim set");
    ClaimSet cs;
    for (const auto& [key, value] : j.items()) {
        if (key == "id") {
            if (!value.is_string()) throw Error(Errc::ParseError, "subject id not a string");
            cs.subject_id = value.get<std::string>();
            continue;
        }
        cs.add(key, value_from_json(value));
    }
    return cs;
}

void validate_schema(const ClaimSet& claim_set, Schema schema) {
    static const std::vector<std::string> kNaturalPerson = {"familyName", "firstNames",
                                                            "dateOfBirth", "uniqueIdentifier"};
    static const std::vector<std::string> kLegalPerson = {"legalName", "uniqueIdentifier"};
    const std::vector<std::string>* mandatory = nullptr;
    switch (schema) {
        case Schema::None:
            return;
        case Schema::EidasNaturalPerson:
            mandatory = &kNaturalPerson;
            break;
        case Schema::EidasLegalPerson:
            mandatory = &kLegalPerson;
            break;
    }
    for (const auto& path : *mandatory)
        if (!claim_set.has(path))
            throw Error(Errc::SchemaViolation, "missing mandatory claim: " + path);
    if (schema == Schema::EidasNaturalPerson &&
        !std::holds_alternative<DateValue>(*claim_set.find("dateOfBirth")))
        throw Error(Errc::SchemaViolation, "dateOfBirth must be a calendar date");
}

std::string mint_credential_id(const did::Did& issuer, const ClaimSet& subject,
                               const std::string& issuance_date) {
    crypto::Sha256Stream h;
    h.update(kIdContext);
    hash_lp(h, issuer);
    hash_lp(h, subject.subject_id);
    hash_lp(h, issuance_date);
    CanonicalClaims canon = canonicalize(subject);
    h.update_u64(canon.messages.size());
    for (const auto& [path, message] : canon.messages) hash_lp(h, to_string(message));
    return std::string(kCredentialIdPrefix) + crypto::digest_to_id(h.finish());
}

Bytes credential_header(const std::string& credential_id, const did::Did& issuer) {
    Bytes out(kHeaderContext.begin(), kHeaderContext.end());
    put_lp(out, credential_id);
    put_lp(out, issuer);
    return out;
}

Bytes make_presentation_header(const Bytes& verifier_nonce) {
    Bytes out = verifier_nonce;
    out.insert(out.end(), kPresentationContext.begin(), kPresentationContext.end());
    return out;
}

std::string credential_to_json(const Credential& credential) {
    nlohmann::json j;
    j["@context"] = credential.context;
    j["id"] = credential.id;
    j["type"] = credential.type_labels;
    j["issuer"] = credential.issuer;
    j["issuanceDate"] = credential.issuance_date;
    j["credentialSubject"] = nlohmann::json::parse(claim_set_to_json(credential.credential_subject));
    j["proof"] = {{"type", credential.proof.type_label},
                  {"created", credential.proof.created},
                  {"proofPurpose", credential.proof.proof_purpose},
                  {"verificationMethod", credential.proof.verification_method},
                  {"proofValue", base64_encode(credential.proof.proof_value)}};
    return j.dump();
}

Credential credential_from_json(const std::string& json) {
    nlohmann::json j = parse_object(json, "credential");
    Credential c;
    const auto& ctx = field(j, "@context");
    if (!ctx.is_array()) throw Error(Errc::ParseError, "@context not an array");
    for (const auto& e : ctx) c.context.push_back(e.get<std::string>());
    c.id = str_field(j, "id");
    const auto& types = field(j, "type");
    if (!types.is_array()) throw Error(Errc::ParseError, "type not an array");
    for (const auto& e : types) c.type_labels.push_back(e.get<std::string>());
    c.issuer = str_field(j, "issuer");
    c.issuance_date = str_field(j, "issuanceDate");
    c.credential_subject = claim_set_from_json(field(j, "credentialSubject").dump());
    const auto& proof = field(j, "proof");
    if (!proof.is_object()) throw Error(Errc::ParseError, "proof not an object");
    c.proof.type_label = str_field(proof, "type");
    c.proof.created = str_field(proof, "created");
    c.proof.proof_purpose = str_field(proof, "proofPurpose");
    c.proof.verification_method = str_field(proof, "verificationMethod");
    try {
        c.proof.proof_value = base64_decode(str_field(proof, "proofValue"));
    } catch (const Error&) {
        throw Error(Errc::ParseError, "proofValue is not base64");
    }
    return c;
}

std::string presentation_to_json(const Presentation& presentation) {
    nlohmann::json disclosed = nlohmann::json::array();
    for (const auto& d : presentation.disclosed)
        disclosed.push_back({{"index", d.index}, {"path", d.path}, {"value", value_to_json(d.value)}});
    nlohmann::json j{{"credentialId", presentation.credential_id},
                     {"issuer", presentation.issuer},
                     {"disclosed", disclosed},
                     {"proof", base64_encode(presentation.proof)},
                     {"presentationHeader", base64_encode(presentation.presentation_header)},
                     {"totalMessageCount", presentation.total_message_count}};
    return j.dump();
}

Presentation presentation_from_json(const std::string& json) {
    nlohmann::json j = parse_object(json, "presentation");
    Presentation p;
    p.credential_id = str_field(j, "credentialId");
    p.issuer = str_field(j, "issuer");
    const auto& disclosed = field(j, "disclosed");
    if (!disclosed.is_array()) throw Error(Errc::ParseError, "disclosed not an array");
    for (const auto& e : disclosed) {
        if (!e.is_object() || !field(e, "index").is_number_unsigned())
            throw Error(Errc::ParseError, "bad disclosed entry");
        p.disclosed.push_back({field(e, "index").get<size_t>(), str_field(e, "path"),
                               value_from_json(field(e, "value"))});
    }
    try {
        p.proof = base64_decode(str_field(j, "proof"));
        p.presentation_header = base64_decode(str_field(j, "presentationHeader"));
    } catch (const Error&) {
        throw Error(Errc::ParseError, "proof fields are not base64");
    }
    const auto& total = field(j, "totalMessageCount");
    if (!total.is_number_unsigned()) throw Error(Errc::ParseError, "bad totalMessageCount");
    p.total_message_count = total.get<size_t>();
    return p;
}

const char* reject_reason_name(RejectReason reason) {
    switch (reason) {
        case RejectReason::None: return "None";
        case RejectReason::BadProof: return "BadProof";
        case RejectReason::NonceMismatch: return "NonceMismatch";
        case RejectReason::Revoked: return "Revoked";
        case RejectReason::UnresolvableIssuer: return "UnresolvableIssuer";
    }
    return "None";
}

std::string derive_output_path(const PredicateSpec& spec) {
    if (!spec.output_path.empty()) return spec.output_path;
    switch (spec.op) {
        case PredicateOp::GreaterOrEqual:
            return spec.source_path + "Over" + std::to_string(spec.bound);
        case PredicateOp::LessOrEqual:
            return spec.source_path + "AtMost" + std::to_string(spec.bound);
        case PredicateOp::InSet:
            return spec.source_path + "InSet";
    }
    throw Error(Errc::UnsupportedOperator, "unknown predicate operator");
}

int64_t age_on(const DateValue& date_of_birth, const DateValue& today) {
    if (!is_date_string(date_of_birth.iso) || !is_date_string(today.iso))
        throw Error(Errc::NonScalarValue, "age needs two calendar dates");
    auto parts = [](const std::string& iso) {
        return std::tuple(std::stoi(iso.substr(0, 4)), std::stoi(iso.substr(5, 2)),
                          std::stoi(iso.substr(8, 2)));
    };
    auto [by, bm, bd] = parts(date_of_birth.iso);
    auto [ty, tm, td] = parts(today.iso);
    int64_t age = ty - by;
    if (std::pair(tm, td) < std::pair(bm, bd)) --age;
    return age;
}

bool evaluate_predicate(const ClaimSet& claim_set, const PredicateSpec& spec,
                        const DateValue& today) {
    const ClaimValue* value = claim_set.find(spec.source_path);
    switch (spec.op) {
        case PredicateOp::GreaterOrEqual:
        case PredicateOp::LessOrEqual: {
            std::optional<int64_t> reference;
            // The birth date is authoritative for age predicates; an
            // explicit integer age claim covers sets without one.
            if (spec.source_path == "age") {
                if (const ClaimValue* dob = claim_set.find("dateOfBirth")) {
                    if (!std::holds_alternative<DateValue>(*dob))
                        throw Error(Errc::UnsupportedOperator, "dateOfBirth is not a calendar date");
                    reference = age_on(std::get<DateValue>(*dob), today);
                }
            }
            if (!reference) {
                if (!value) throw Error(Errc::PredicateOnMissingPath, spec.source_path);
                if (!std::holds_alternative<int64_t>(*value))
                    throw Error(Errc::UnsupportedOperator,
                                "ordering predicates need an integer source: " + spec.source_path);
                reference = std::get<int64_t>(*value);
            }
            return spec.op == PredicateOp::GreaterOrEqual ? *reference >= spec.bound
                                                          : *reference <= spec.bound;
        }
        case PredicateOp::InSet: {
            if (!value) throw Error(Errc::PredicateOnMissingPath, spec.source_path);
            std::string text = value_text(*value);
            return std::find(spec.member_set.begin(), spec.member_set.end(), text) !=
                   spec.member_set.end();
        }
    }
    throw Error(Errc::UnsupportedOperator, "unknown predicate operator");
}

Bytes revocation_signing_bytes(const did::Did& issuer, const std::set<std::string>& revoked,
                               uint64_t sequence) {
    Bytes out(kRevocationContext.begin(), kRevocationContext.end());
    put_lp(out, issuer);
    for (int i = 7; i >= 0; --i) out.push_back(uint8_t(sequence >> (8 * i)));
    for (int i = 7; i >= 0; --i) out.push_back(uint8_t(revoked.size() >> (8 * i)));
    for (const auto& id : revoked) put_lp(out, id);
    return out;
}

std::string revocation_to_json(const RevocationList& list) {
    nlohmann::json j{{"issuer", list.issuer},
                     {"revoked", list.revoked},
                     {"seq", list.sequence},
                     {"sig", base64url_encode(list.signature)}};
    return j.dump();
}

RevocationList revocation_from_json(const std::string& json) {
    nlohmann::json j = parse_object(json, "revocation list");
    RevocationList list;
    list.issuer = str_field(j, "issuer");
    const auto& revoked = field(j, "revoked");
    if (!revoked.is_array()) throw Error(Errc::ParseError, "revoked not an array");
    for (const auto& e : revoked) {
        if (!e.is_string()) throw Error(Errc::ParseError, "revoked entry not a string");
        list.revoked.insert(e.get<std::string>());
    }
    const auto& seq = field(j, "seq");
    if (!seq.is_number_unsigned()) throw Error(Errc::ParseError, "bad sequence");
    list.sequence = seq.get<uint64_t>();
    list.signature = base64url_decode(str_field(j, "sig"));
    return list;
}

std::string rfc3339_utc_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

DateValue utc_today() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[16];
    std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
    return DateValue{buf};
}

Bytes CredentialService::resolve_bbs_key(const did::Did& issuer) {
    did::DidDocument doc;
    try {
        doc = dids_.resolve_did(issuer);
    } catch (const Error& e) {
        throw Error(Errc::UnresolvableIssuer, e.what());
    }
    if (doc.deactivated) throw Error(Errc::UnresolvableIssuer, "issuer document is deactivated");
    for (const auto& method : doc.verification_methods)
        if (method.type_label == did::kBbsKeyType) return method.public_key;
    throw Error(Errc::UnresolvableIssuer, "issuer document carries no multi-message signing key");
}

Credential CredentialService::sign_subject(const bls12::Fr& issuer_sk, const did::Did& issuer_did,
                                           ClaimSet subject) {
    Credential c;
    c.context = {std::string(kCredentialContext)};
    c.type_labels = {std::string(kCredentialType)};
    c.issuer = issuer_did;
    c.issuance_date = rfc3339_utc_now();
    c.id = mint_credential_id(issuer_did, subject, c.issuance_date);
    c.credential_subject = std::move(subject);

    CanonicalClaims canon = canonicalize(c.credential_subject);
    std::vector<Bytes> messages;
    messages.reserve(canon.messages.size());
    for (const auto& [path, message] : canon.messages) messages.push_back(message);
    bbs::Signature sig = bbs::sign(issuer_sk, credential_header(c.id, issuer_did), messages);

    c.proof.type_label = std::string(kProofType);
    c.proof.created = c.issuance_date;
    c.proof.proof_purpose = std::string(kProofPurpose);
    c.proof.verification_method = issuer_did + "#" + std::string(did::kBbsFragment);
    c.proof.proof_value = bbs::signature_to_bytes(sig);
    return c;
}

Credential CredentialService::issue(const bls12::Fr& issuer_sk, const did::Did& issuer_did,
                                    const did::Did& holder_did, const Bytes& holder_pubkey,
                                    const ClaimSet& claim_set, Schema schema) {
    canonicalize(claim_set);  // surfaces duplicate or malformed claims first
    validate_schema(claim_set, schema);
    if (!crypto::ed25519_valid_pubkey(holder_pubkey))
        throw Error(Errc::InvalidKey, "holder public key is not a valid signing key");
    Bytes issuer_pk = resolve_bbs_key(issuer_did);
    if (bbs::public_key_of(issuer_sk) != issuer_pk)
        throw Error(Errc::NotIssuer, "secret key does not match the issuer's published key");

    ClaimSet subject = claim_set;
    subject.subject_id = holder_did;
    subject.set(std::string(kHolderKeyPath), base58_encode(holder_pubkey));
    return sign_subject(issuer_sk, issuer_did, std::move(subject));
}

Credential CredentialService::issue_with_predicates(
    const bls12::Fr& issuer_sk, const did::Did& issuer_did, const did::Did& holder_did,
    const Bytes& holder_pubkey, const ClaimSet& claim_set,
    const std::vector<PredicateSpec>& predicates, Schema schema, std::optional<DateValue> today) {
    DateValue evaluation_date = today.value_or(utc_today());
    ClaimSet augmented = claim_set;
    for (const auto& spec : predicates)
        augmented.add(derive_output_path(spec), evaluate_predicate(claim_set, spec, evaluation_date));
    return issue(issuer_sk, issuer_did, holder_did, holder_pubkey, augmented, schema);
}

bool CredentialService::verify_credential(const Credential& credential) {
    if (std::find(credential.type_labels.begin(), credential.type_labels.end(),
                  kCredentialType) == credential.type_labels.end())
        return false;
    if (credential.proof.type_label != kProofType) return false;
    auto sig = bbs::signature_from_bytes(credential.proof.proof_value);
    if (!sig) return false;
    Bytes issuer_pk;
    try {
        issuer_pk = resolve_bbs_key(credential.issuer);
    } catch (const Error&) {
        return false;
    }
    CanonicalClaims canon = canonicalize(credential.credential_subject);
    std::vector<Bytes> messages;
    messages.reserve(canon.messages.size());
    for (const auto& [path, message] : canon.messages) messages.push_back(message);
    return bbs::verify(issuer_pk, credential_header(credential.id, credential.issuer), messages,
                       *sig);
}

Presentation CredentialService::present(const Credential& credential,
                                        const std::set<std::string>& disclose_paths,
                                        const Bytes& verifier_nonce, crypto::Rng& rng) {
    if (!verify_credential(credential))
        throw Error(Errc::InvalidCredential, "credential does not verify against its issuer");

    CanonicalClaims canon = canonicalize(credential.credential_subject);
    std::vector<size_t> indexes;
    for (const auto& path : disclose_paths) {
        auto it = canon.index_map.find(path);
        if (it == canon.index_map.end()) throw Error(Errc::UnknownPath, path);
        indexes.push_back(it->second);
    }
    std::sort(indexes.begin(), indexes.end());

    std::vector<Bytes> messages;
    messages.reserve(canon.messages.size());
    for (const auto& [path, message] : canon.messages) messages.push_back(message);

    Presentation p;
    p.credential_id = credential.id;
    p.issuer = credential.issuer;
    p.presentation_header = make_presentation_header(verifier_nonce);
    p.total_message_count = messages.size();
    Bytes issuer_pk = resolve_bbs_key(credential.issuer);
    auto sig = bbs::signature_from_bytes(credential.proof.proof_value);
    p.proof = bbs::create_proof(issuer_pk, *sig, credential_header(p.credential_id, p.issuer),
                                p.presentation_header, messages, indexes, rng);
    for (size_t idx : indexes) {
        auto [path, value] = decode_claim(canon.messages[idx].second);
        p.disclosed.push_back({idx, path, value});
    }
    return p;
}

VerificationOutcome CredentialService::verify_presentation(const Presentation& presentation,
                                                           const Bytes& expected_nonce) {
    auto reject = [](RejectReason reason, std::string detail) {
        return VerificationOutcome{false, reason, std::move(detail)};
    };
    Bytes issuer_pk;
    try {
        issuer_pk = resolve_bbs_key(presentation.issuer);
    } catch (const Error& e) {
        return reject(RejectReason::UnresolvableIssuer, e.what());
    }
    if (presentation.presentation_header != make_presentation_header(expected_nonce))
        return reject(RejectReason::NonceMismatch, "presentation bound to a different nonce");

    // Disclosed entries must mirror canonical ordering: strictly increasing
    // indexes and byte-ordered paths. The re-encoded pairs feed the proof
    // check, so a lying path or value surfaces as a proof failure.
    std::vector<std::pair<size_t, Bytes>> disclosed;
    const std::string* previous_path = nullptr;
    try {
        for (const auto& d : presentation.disclosed) {
            if (d.index >= presentation.total_message_count)
                return reject(RejectReason::BadProof, "disclosed index out of range");
            if (!disclosed.empty() && d.index <= disclosed.back().first)
                return reject(RejectReason::BadProof, "disclosed indexes not increasing");
            if (previous_path && *previous_path >= d.path)
                return reject(RejectReason::BadProof, "disclosed paths out of canonical order");
            disclosed.emplace_back(d.index, encode_claim(d.path, d.value));
            previous_path = &d.path;
        }
    } catch (const Error& e) {
        return reject(RejectReason::BadProof, e.what());
    }
    if (!bbs::verify_proof(issuer_pk, presentation.proof,
                           credential_header(presentation.credential_id, presentation.issuer),
                           presentation.presentation_header, disclosed,
                           presentation.total_message_count))
        return reject(RejectReason::BadProof, "proof check failed");
    if (is_revoked(presentation.issuer, presentation.credential_id))
        return reject(RejectReason::Revoked, "credential id is on the issuer's revocation list");
    return {true, RejectReason::None, ""};
}

weave::TxId CredentialService::revoke(const crypto::Ed25519KeyPair& issuer_auth,
                                      const did::Did& issuer, const std::string& credential_id) {
    did::DidDocument doc;
    try {
        doc = dids_.resolve_did(issuer);
    } catch (const Error& e) {
        throw Error(Errc::UnresolvableIssuer, e.what());
    }
    if (auth_key_of(doc) != issuer_auth.public_key)
        throw Error(Errc::NotIssuer, "revocation key is not the issuer's authentication key");

    RevocationList next;
    next.issuer = issuer;
    if (auto current = latest_revocation(issuer)) {
        next.revoked = std::move(current->revoked);
        next.sequence = current->sequence + 1;
    } else {
        next.sequence = 1;
    }
    next.revoked.insert(credential_id);
    next.signature = crypto::ed25519_sign(
        issuer_auth.secret_key, revocation_signing_bytes(issuer, next.revoked, next.sequence));

    weave::TxId tx = weave_.submit(issuer_auth.address(),
                                   {{"Content-Type", "application/json"},
                                    {std::string(kRevocationTag), issuer}},
                                   to_bytes(revocation_to_json(next)));
    weave_.mine_block();  // a pending-only list would be invisible to verifiers
    return tx;
}

std::optional<RevocationList> CredentialService::latest_revocation(const did::Did& issuer) {
    did::DidDocument doc;
    try {
        doc = dids_.resolve_did(issuer);
    } catch (const Error&) {
        return std::nullopt;
    }
    const Bytes& auth_key = auth_key_of(doc);

    std::optional<RevocationList> best;
    weave::TxId best_tx;
    for (const auto& txid : weave_.query({{std::string(kRevocationTag), issuer}})) {
        weave::Transaction tx = weave_.get(txid);
        RevocationList list;
        try {
            list = revocation_from_json(to_string(tx.data));
        } catch (const Error&) {
            continue;  // injected garbage never influences revocation state
        }
        if (list.issuer != issuer) continue;
        if (!crypto::ed25519_verify(auth_key,
                                    revocation_signing_bytes(issuer, list.revoked, list.sequence),
                                    list.signature))
            continue;
        if (!best || list.sequence > best->sequence ||
            (list.sequence == best->sequence && txid < best_tx)) {
            best = std::move(list);
            best_tx = txid;
        }
    }
    return best;
}

bool CredentialService::is_revoked(const did::Did& issuer, const std::string& credential_id) {
    auto list = latest_revocation(issuer);
    return list && list->revoked.count(credential_id) > 0;
}

}  // namespace permadid::vc
