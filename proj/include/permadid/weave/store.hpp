#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "permadid/bytes.hpp"

namespace permadid::weave {

using TxId = std::string;
using BlockId = std::string;
using Address = std::string;
using ItemId = std::string;

/// Transaction metadata. Name must be non-empty and at most 64 bytes,
/// value at most 1024 bytes.
struct Tag {
    std::string name;
    std::string value;

    bool operator==(const Tag&) const = default;
};

struct Transaction {
    TxId id;            // 43-char base64url content hash of (owner, tags, data)
    Address owner;      // 43-char base64url address
    std::vector<Tag> tags;
    Bytes data;
    uint64_t submitted_at = 0;  // logical timestamp, monotone per store
    uint64_t fee = 0;           // recorded per-byte cost, never enforced
};

struct Block {
    uint64_t height = 0;
    std::optional<BlockId> prev_id;    // absent only for genesis
    std::optional<BlockId> recall_id;  // defined from height 2 upward
    std::vector<TxId> tx_ids;
    BlockId block_id;  // 43-char base64url hash of the canonical block body
};

struct BundleItem {
    std::vector<Tag> tags;
    Bytes data;
    ItemId item_id;  // content hash of (owner, tags, data), like a transaction id
};

struct WeaveConfig {
    size_t max_data_bytes = 10 * 1024 * 1024;
    bool allow_empty_blocks = false;
    uint64_t fee_per_byte = 1;
};

/// Canonical transaction serialization: every field length-prefixed with a
/// big-endian u64 — owner, tag count, then (name, value) per tag, then data.
Bytes canonical_transaction(const Address& owner, const std::vector<Tag>& tags,
                            const Bytes& data);

/// Content address: base64url(sha256(canonical_transaction(...))), 43 chars.
TxId transaction_id(const Address& owner, const std::vector<Tag>& tags, const Bytes& data);

/// Recall index for a block at `height`: sha256 of the previous block id,
/// read as a big-endian integer, reduced mod height.
uint64_t recall_index(const BlockId& prev_id, uint64_t height);

/// Simulated permanent storage: an append-only chain of blocks where each
/// block links to its predecessor and, from height 2 on, to one older
/// "recall" block chosen by recall_index. Transactions are content-addressed
/// and immutable once sealed. Many readers may operate concurrently; all
/// mutations are serialized through an internal single-writer lock.
class WeaveStore {
public:
    explicit WeaveStore(WeaveConfig config = {});

    /// Adds a transaction to the pending pool and returns its content
    /// address. Resubmitting identical content is idempotent.
    TxId submit(const Address& owner, const std::vector<Tag>& tags, const Bytes& data);

    /// Seals the pending pool into a new block. The first call creates the
    /// genesis block and may be empty; later calls require pending
    /// transactions unless the config allows empty blocks.
    Block mine_block();

    /// Fetches a sealed or pending transaction by id.
    Transaction get(const TxId& tx_id) const;
    bool has(const TxId& tx_id) const;

    /// Ids of all sealed transactions carrying every tag in `filter`
    /// (exact name+value match), ordered by (block height, intra-block
    /// index). An empty filter matches everything sealed.
    std::vector<TxId> query(const std::vector<Tag>& filter) const;

    /// Packs several (tags, data) items into one top-level transaction.
    /// Item ids are content hashes of (owner, tags, data), so a one-item
    /// bundle's item id equals the id a direct submit would produce.
    std::pair<TxId, std::vector<ItemId>> bundle_submit(
        const Address& owner, const std::vector<std::pair<std::vector<Tag>, Bytes>>& items);

    /// Decodes a bundle transaction back into its items, bit-exact.
    static std::vector<BundleItem> unbundle(const Transaction& tx);

    /// Looks up a bundled item by its item id (sealed or pending bundles).
    BundleItem get_item(const ItemId& item_id) const;
    bool has_item(const ItemId& item_id) const;

    /// Replays the chain from genesis: recomputes every transaction id and
    /// block id, and checks prev/recall linkage. Returns true iff all hold;
    /// on failure each violation is described in `diagnostics` naming the
    /// block height.
    bool verify_weave(std::vector<std::string>* diagnostics = nullptr) const;

    /// Snapshot persistence: blocks in height order, each followed by its
    /// full transaction bodies. Pending transactions are not persisted.
    void save(const std::string& path) const;
    static WeaveStore load(const std::string& path, WeaveConfig config = {});

    uint64_t block_count() const;
    size_t sealed_tx_count() const;
    size_t pending_count() const;
    Block block_at(uint64_t height) const;
    Block tip() const;
    uint64_t now() const;  // next logical timestamp

    const WeaveConfig& config() const { return config_; }

private:
    TxId submit_locked(const Address& owner, const std::vector<Tag>& tags, const Bytes& data);
    void index_bundle_locked(const TxId& bundle_tx);

    WeaveConfig config_;
    // Behind a pointer so the store stays movable (load returns by value).
    mutable std::unique_ptr<std::shared_mutex> mutex_ = std::make_unique<std::shared_mutex>();
    std::vector<Block> blocks_;
    std::unordered_map<TxId, Transaction> txs_;  // sealed and pending bodies
    std::vector<TxId> pending_;                  // submission order
    std::unordered_map<ItemId, std::pair<TxId, size_t>> items_;  // item -> (bundle, index)
    uint64_t clock_ = 0;
};

}  // namespace permadid::weave
