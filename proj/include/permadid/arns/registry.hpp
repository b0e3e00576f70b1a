#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "permadid/crypto.hpp"
#include "permadid/weave/store.hpp"

namespace permadid::arns {

/// A name-to-transaction mapping, stored on the weave as JSON under the tag
/// ("ArNS-Name", name) and signed by the owner's authentication key.
struct NameRecord {
    std::string name;          // [a-z0-9-]{1,51}, no leading/trailing '-'
    weave::TxId target;
    std::string owner_address; // key_address(owner_pubkey)
    Bytes owner_pubkey;        // Ed25519, 32 bytes
    uint64_t sequence = 0;     // strictly increases across updates of a name
    Bytes signature;           // Ed25519 over record_signing_bytes
    weave::TxId record_tx;     // transaction housing this record
};

bool valid_name(std::string_view name);

/// Domain-separated byte string the owner signs: binds name, target and
/// sequence so a record cannot be replayed for another name or re-pointed.
Bytes record_signing_bytes(std::string_view name, std::string_view target, uint64_t sequence);

/// JSON encoding {"name","target","owner","seq","sig"}; owner and sig are
/// base64url byte fields (owner carries the verification key itself).
std::string record_to_json(const NameRecord& record);
NameRecord record_from_json(std::string_view json);  // throws ParseError

/// Decentralized naming over the weave. Registrations and updates are new
/// transactions (weave data is immutable); resolution reads sealed records
/// only, so a record becomes authoritative after the next mined block.
class NameRegistry {
public:
    explicit NameRegistry(weave::WeaveStore& weave) : weave_(weave) {}

    /// Claims a fresh name (sequence 0) or, when the caller already owns
    /// it, re-points it like an update.
    NameRecord register_name(const std::string& name, const weave::TxId& target,
                             const crypto::Ed25519KeyPair& owner_key);

    /// Points an owned name at a new target with sequence = previous + 1.
    NameRecord update(const std::string& name, const weave::TxId& target,
                      const crypto::Ed25519KeyPair& owner_key);

    /// Returns the target and record with the highest sequence among sealed
    /// records that verify and belong to the name's owner (the first valid
    /// registrant); ties on sequence break toward the smallest record_tx.
    std::pair<weave::TxId, NameRecord> resolve(const std::string& name) const;

    bool is_registered(const std::string& name) const;

private:
    std::optional<NameRecord> best_record(const std::string& name) const;
    NameRecord publish(const std::string& name, const weave::TxId& target,
                       const crypto::Ed25519KeyPair& owner_key, uint64_t sequence);

    weave::WeaveStore& weave_;
};

}  // namespace permadid::arns
