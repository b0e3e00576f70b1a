#include "permadid/arns/registry.hpp"

#include <json.hpp>

#include "permadid/errors.hpp"

namespace permadid::arns {

namespace {

constexpr std::string_view kNameTag = "ArNS-Name";
constexpr std::string_view kSigningContext = "arns:v1";

void check_name(const std::string& name) {
    if (!valid_name(name))
        throw Error(Errc::InvalidName,
                    "name must match [a-z0-9-]{1,51} without leading/trailing '-': " + name);
}

std::optional<NameRecord> parse_candidate(const weave::Transaction& tx, const std::string& name) {
    NameRecord rec;
    try {
        rec = record_from_json(to_string(tx.data));
    } catch (const Error&) {
        return std::nullopt;
    }
    if (rec.name != name || !valid_name(rec.name)) return std::nullopt;
    if (!crypto::ed25519_verify(rec.owner_pubkey,
                                record_signing_bytes(rec.name, rec.target, rec.sequence),
                                rec.signature))
        return std::nullopt;
    rec.record_tx = tx.id;
    return rec;
}

}  // namespace

bool valid_name(std::string_view name) {
    if (name.empty() || name.size() > 51) return false;
    if (name.front() == '-' || name.back() == '-') return false;
    for (char c : name)
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-')) return false;
    return true;
}

Bytes record_signing_bytes(std::string_view name, std::string_view target, uint64_t sequence) {
    Bytes out(kSigningContext.begin(), kSigningContext.end());
    auto put = [&](std::string_view s) {
        for (int i = 7; i >= 0; --i) out.push_back(uint8_t(s.size() >> (8 * i)));
        out.insert(out.end(), s.begin(), s.end());
    };
    put(name);
    put(target);
    for (int i = 7; i >= 0; --i) out.push_back(uint8_t(sequence >> (8 * i)));
    return out;
}

std::string record_to_json(const NameRecord& record) {
    nlohmann::json j{{"name", record.name},
                     {"target", record.target},
                     {"owner", base64url_encode(record.owner_pubkey)},
                     {"seq", record.sequence},
                     {"sig", base64url_encode(record.signature)}};
    return j.dump();
}

NameRecord record_from_json(std::string_view json) {
    nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw Error(Errc::ParseError, "name record is not a JSON object");
    NameRecord rec;
    try {
        rec.name = j.at("name").get<std::string>();
        rec.target = j.at("target").get<std::string>();
        rec.owner_pubkey = base64url_decode(j.at("owner").get<std::string>());
        rec.sequence = j.at("seq").get<uint64_t>();
        rec.signature = base64url_decode(j.at("sig").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ParseError, std::string("name record: ") + e.what());
    }
    rec.owner_address = crypto::key_address(rec.owner_pubkey);
    return rec;
}

NameRecord NameRegistry::register_name(const std::string& name, const weave::TxId& target,
                                       const crypto::Ed25519KeyPair& owner_key) {
    check_name(name);
    std::optional<NameRecord> current = best_record(name);
    uint64_t sequence = 0;
    if (current) {
        if (current->owner_address != owner_key.address())
            throw Error(Errc::NameTaken, name + " is owned by " + current->owner_address);
        sequence = current->sequence + 1;  // re-registration by the owner is an update
    }
    return publish(name, target, owner_key, sequence);
}

NameRecord NameRegistry::update(const std::string& name, const weave::TxId& target,
                                const crypto::Ed25519KeyPair& owner_key) {
    check_name(name);
    std::optional<NameRecord> current = best_record(name);
    if (!current) throw Error(Errc::UnknownName, "no sealed record for " + name);
    if (current->owner_address != owner_key.address())
        throw Error(Errc::NotOwner, name + " is owned by " + current->owner_address);
    return publish(name, target, owner_key, current->sequence + 1);
}

std::pair<weave::TxId, NameRecord> NameRegistry::resolve(const std::string& name) const {
    // A syntactically invalid name can never have a valid record, so it
    // resolves like any unknown one.
    std::optional<NameRecord> best = valid_name(name) ? best_record(name) : std::nullopt;
    if (!best) throw Error(Errc::UnknownName, "no valid sealed record for " + name);
    return {best->target, *best};
}

bool NameRegistry::is_registered(const std::string& name) const {
    return valid_name(name) && best_record(name).has_value();
}

std::optional<NameRecord> NameRegistry::best_record(const std::string& name) const {
    std::vector<weave::TxId> candidates =
        weave_.query({{std::string(kNameTag), name}});  // sealed, in seal order
    std::optional<NameRecord> best;
    std::optional<std::string> owner;  // first valid registrant holds the name
    for (const weave::TxId& id : candidates) {
        std::optional<NameRecord> rec = parse_candidate(weave_.get(id), name);
        if (!rec) continue;
        if (!owner) owner = rec->owner_address;
        if (rec->owner_address != *owner) continue;
        if (!best || rec->sequence > best->sequence ||
            (rec->sequence == best->sequence && rec->record_tx < best->record_tx))
            best = rec;
    }
    return best;
}

NameRecord NameRegistry::publish(const std::string& name, const weave::TxId& target,
                                 const crypto::Ed25519KeyPair& owner_key, uint64_t sequence) {
    NameRecord rec;
    rec.name = name;
    rec.target = target;
    rec.owner_pubkey = owner_key.public_key;
    rec.owner_address = owner_key.address();
    rec.sequence = sequence;
    rec.signature =
        crypto::ed25519_sign(owner_key.secret_key, record_signing_bytes(name, target, sequence));
    rec.record_tx = weave_.submit(rec.owner_address, {{std::string(kNameTag), name}},
                                  to_bytes(record_to_json(rec)));
    return rec;
}

}  // namespace permadid::arns
