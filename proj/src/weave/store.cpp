#include "permadid/weave/store.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>

#include "permadid/crypto.hpp"
#include "permadid/errors.hpp"

namespace permadid::weave {

namespace {

constexpr std::string_view kSnapshotMagic = "PWEAVE1\n";
constexpr std::string_view kBundleFormatTag = "Bundle-Format";
constexpr std::string_view kBundleFormatValue = "binary";
constexpr std::string_view kBundleVersionTag = "Bundle-Version";
constexpr std::string_view kBundleVersionValue = "1";

void put_u64(Bytes& out, uint64_t v) {
    for (int i = 7; i >= 0; --i) out.push_back(uint8_t(v >> (8 * i)));
}

void put_lp(Bytes& out, std::string_view s) {
    put_u64(out, s.size());
    out.insert(out.end(), s.begin(), s.end());
}

void put_lp(Bytes& out, const Bytes& b) {
    put_u64(out, b.size());
    out.insert(out.end(), b.begin(), b.end());
}

/// Bounds-checked big-endian reader for snapshot and bundle payloads.
class Reader {
public:
    Reader(const uint8_t* data, size_t len, Errc errc)
        : data_(data), len_(len), errc_(errc) {}

    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_ + i];
        pos_ += 8;
        return v;
    }

    uint8_t u8() {
        need(1);
        return data_[pos_++];
    }

    std::string str() {
        uint64_t n = u64();
        need(n);
        std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
        pos_ += n;
        return s;
    }

    Bytes bytes() {
        uint64_t n = u64();
        need(n);
        Bytes b(data_ + pos_, data_ + pos_ + n);
        pos_ += n;
        return b;
    }

    bool done() const { return pos_ == len_; }

private:
    void need(uint64_t n) {
        if (n > len_ - pos_) throw Error(errc_, "truncated record");
    }

    const uint8_t* data_;
    size_t len_;
    size_t pos_ = 0;
    Errc errc_;
};

void check_tags(const std::vector<Tag>& tags) {
    for (const Tag& t : tags) {
        if (t.name.empty()) throw Error(Errc::MalformedTag, "empty tag name");
        if (t.name.size() > 64)
            throw Error(Errc::MalformedTag, "tag name exceeds 64 bytes: " + t.name.substr(0, 16));
        if (t.value.size() > 1024)
            throw Error(Errc::MalformedTag, "tag value exceeds 1024 bytes for: " + t.name);
    }
}

void check_owner(const Address& owner) {
    if (owner.size() != 43 || !is_base64url(owner))
        throw Error(Errc::ParseError, "owner must be a 43-character base64url address");
}

bool has_tag(const std::vector<Tag>& tags, std::string_view name, std::string_view value) {
    return std::any_of(tags.begin(), tags.end(),
                       [&](const Tag& t) { return t.name == name && t.value == value; });
}

/// Block body digest covers the header fields plus every sealed transaction's
/// id and logical timestamp; transaction bodies are covered transitively via
/// their content-addressed ids.
BlockId compute_block_id(const Block& b, const std::vector<const Transaction*>& txs) {
    crypto::Sha256Stream h;
    h.update_u64(b.height);
    h.update_byte(b.prev_id ? 1 : 0);
    if (b.prev_id) {
        h.update_u64(b.prev_id->size());
        h.update(*b.prev_id);
    }
    h.update_byte(b.recall_id ? 1 : 0);
    if (b.recall_id) {
        h.update_u64(b.recall_id->size());
        h.update(*b.recall_id);
    }
    h.update_u64(txs.size());
    for (const Transaction* tx : txs) {
        h.update_u64(tx->id.size());
        h.update(tx->id);
        h.update_u64(tx->submitted_at);
    }
    return crypto::digest_to_id(h.finish());
}

Bytes encode_bundle(const std::vector<std::pair<std::vector<Tag>, Bytes>>& items) {
    Bytes out;
    put_u64(out, items.size());
    for (const auto& [tags, data] : items) {
        put_u64(out, tags.size());
        for (const Tag& t : tags) {
            put_lp(out, t.name);
            put_lp(out, t.value);
        }
        put_lp(out, data);
    }
    return out;
}

}  // namespace

Bytes canonical_transaction(const Address& owner, const std::vector<Tag>& tags,
                            const Bytes& data) {
    Bytes out;
    put_lp(out, owner);
    put_u64(out, tags.size());
    for (const Tag& t : tags) {
        put_lp(out, t.name);
        put_lp(out, t.value);
    }
    put_lp(out, data);
    return out;
}

TxId transaction_id(const Address& owner, const std::vector<Tag>& tags, const Bytes& data) {
    return crypto::digest_to_id(crypto::sha256(canonical_transaction(owner, tags, data)));
}

uint64_t recall_index(const BlockId& prev_id, uint64_t height) {
    crypto::Digest d = crypto::sha256(prev_id);
    uint64_t r = 0;
    for (uint8_t byte : d) r = uint64_t(((unsigned __int128)r << 8 | byte) % height);
    return r;
}

WeaveStore::WeaveStore(WeaveConfig config) : config_(config) {}

TxId WeaveStore::submit(const Address& owner, const std::vector<Tag>& tags, const Bytes& data) {
    std::unique_lock lock(*mutex_);
    return submit_locked(owner, tags, data);
}

TxId WeaveStore::submit_locked(const Address& owner, const std::vector<Tag>& tags,
                               const Bytes& data) {
    check_owner(owner);
    check_tags(tags);
    if (data.size() > config_.max_data_bytes)
        throw Error(Errc::OversizeData, "data size " + std::to_string(data.size()) +
                                            " exceeds limit " +
                                            std::to_string(config_.max_data_bytes));
    TxId id = transaction_id(owner, tags, data);
    if (txs_.count(id)) return id;  // content addressing makes resubmission a no-op
    Transaction tx{id, owner, tags, data, clock_++, data.size() * config_.fee_per_byte};
    txs_.emplace(id, std::move(tx));
    pending_.push_back(id);
    return id;
}

Block WeaveStore::mine_block() {
    std::unique_lock lock(*mutex_);
    if (!blocks_.empty() && pending_.empty() && !config_.allow_empty_blocks)
        throw Error(Errc::NothingToMine, "pending pool is empty");
    Block b;
    b.height = blocks_.size();
    b.tx_ids = pending_;
    if (!blocks_.empty()) {
        b.prev_id = blocks_.back().block_id;
        if (b.height >= 2) b.recall_id = blocks_[recall_index(*b.prev_id, b.height)].block_id;
    }
    std::vector<const Transaction*> txs;
    txs.reserve(b.tx_ids.size());
    for (const TxId& id : b.tx_ids) txs.push_back(&txs_.at(id));
    b.block_id = compute_block_id(b, txs);
    pending_.clear();
    blocks_.push_back(b);
    return b;
}

Transaction WeaveStore::get(const TxId& tx_id) const {
    std::shared_lock lock(*mutex_);
    auto it = txs_.find(tx_id);
    if (it == txs_.end()) throw Error(Errc::NotFound, "no transaction " + tx_id);
    return it->second;
}

bool WeaveStore::has(const TxId& tx_id) const {
    std::shared_lock lock(*mutex_);
    return txs_.count(tx_id) != 0;
}

std::vector<TxId> WeaveStore::query(const std::vector<Tag>& filter) const {
    std::shared_lock lock(*mutex_);
    std::vector<TxId> out;
    for (const Block& b : blocks_) {
        for (const TxId& id : b.tx_ids) {
            const Transaction& tx = txs_.at(id);
            bool all = std::all_of(filter.begin(), filter.end(), [&](const Tag& want) {
                return has_tag(tx.tags, want.name, want.value);
            });
            if (all) out.push_back(id);
        }
    }
    return out;
}

std::pair<TxId, std::vector<ItemId>> WeaveStore::bundle_submit(
    const Address& owner, const std::vector<std::pair<std::vector<Tag>, Bytes>>& items) {
    std::unique_lock lock(*mutex_);
    if (items.empty()) throw Error(Errc::EmptyBundle, "bundle has no items");
    std::vector<ItemId> ids;
    ids.reserve(items.size());
    for (const auto& [tags, data] : items) {
        check_tags(tags);
        ids.push_back(transaction_id(owner, tags, data));
    }
    std::vector<Tag> bundle_tags{{std::string(kBundleFormatTag), std::string(kBundleFormatValue)},
                                 {std::string(kBundleVersionTag), std::string(kBundleVersionValue)}};
    TxId top = submit_locked(owner, bundle_tags, encode_bundle(items));
    for (size_t i = 0; i < ids.size(); ++i) items_[ids[i]] = {top, i};
    return {top, ids};
}

std::vector<BundleItem> WeaveStore::unbundle(const Transaction& tx) {
    if (!has_tag(tx.tags, kBundleFormatTag, kBundleFormatValue))
        throw Error(Errc::ParseError, "transaction " + tx.id + " is not a bundle");
    Reader r(tx.data.data(), tx.data.size(), Errc::ParseError);
    uint64_t count = r.u64();
    std::vector<BundleItem> items;
    items.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
        BundleItem item;
        uint64_t tag_count = r.u64();
        item.tags.reserve(tag_count);
        for (uint64_t t = 0; t < tag_count; ++t) {
            std::string name = r.str();
            std::string value = r.str();
            item.tags.push_back({std::move(name), std::move(value)});
        }
        item.data = r.bytes();
        item.item_id = transaction_id(tx.owner, item.tags, item.data);
        items.push_back(std::move(item));
    }
    if (!r.done()) throw Error(Errc::ParseError, "trailing bytes after bundle items");
    return items;
}

BundleItem WeaveStore::get_item(const ItemId& item_id) const {
    std::shared_lock lock(*mutex_);
    auto it = items_.find(item_id);
    if (it == items_.end()) throw Error(Errc::NotFound, "no bundle item " + item_id);
    std::vector<BundleItem> items = unbundle(txs_.at(it->second.first));
    return items.at(it->second.second);
}

bool WeaveStore::has_item(const ItemId& item_id) const {
    std::shared_lock lock(*mutex_);
    return items_.count(item_id) != 0;
}

bool WeaveStore::verify_weave(std::vector<std::string>* diagnostics) const {
    std::shared_lock lock(*mutex_);
    std::vector<std::string> local;
    std::vector<std::string>& diag = diagnostics ? *diagnostics : local;
    auto fail = [&](uint64_t height, const std::string& what) {
        diag.push_back("block " + std::to_string(height) + ": " + what);
    };
    for (size_t i = 0; i < blocks_.size(); ++i) {
        const Block& b = blocks_[i];
        if (b.height != i) fail(i, "height field reads " + std::to_string(b.height));
        if (i == 0) {
            if (b.prev_id) fail(i, "genesis carries a prev id");
            if (b.recall_id) fail(i, "genesis carries a recall id");
        } else {
            if (!b.prev_id || *b.prev_id != blocks_[i - 1].block_id)
                fail(i, "prev id does not match block " + std::to_string(i - 1));
            if (i == 1) {
                if (b.recall_id) fail(i, "recall id defined below height 2");
            } else if (b.prev_id) {
                uint64_t idx = recall_index(*b.prev_id, i);
                if (!b.recall_id || *b.recall_id != blocks_[idx].block_id)
                    fail(i, "recall id does not match block at index " + std::to_string(idx));
            }
        }
        std::vector<const Transaction*> txs;
        bool bodies_ok = true;
        for (const TxId& id : b.tx_ids) {
            auto it = txs_.find(id);
            if (it == txs_.end()) {
                fail(i, "missing body for transaction " + id);
                bodies_ok = false;
                continue;
            }
            const Transaction& tx = it->second;
            if (transaction_id(tx.owner, tx.tags, tx.data) != id) {
                fail(i, "content hash mismatch for transaction " + id);
                bodies_ok = false;
            }
            txs.push_back(&tx);
        }
        if (bodies_ok && compute_block_id(b, txs) != b.block_id)
            fail(i, "block id does not match block body");
    }
    return diag.empty();
}

void WeaveStore::save(const std::string& path) const {
    std::shared_lock lock(*mutex_);
    Bytes out;
    out.insert(out.end(), kSnapshotMagic.begin(), kSnapshotMagic.end());
    put_u64(out, blocks_.size());
    for (const Block& b : blocks_) {
        put_u64(out, b.height);
        out.push_back(b.prev_id ? 1 : 0);
        if (b.prev_id) put_lp(out, *b.prev_id);
        out.push_back(b.recall_id ? 1 : 0);
        if (b.recall_id) put_lp(out, *b.recall_id);
        put_lp(out, b.block_id);
        put_u64(out, b.tx_ids.size());
        for (const TxId& id : b.tx_ids) {
            const Transaction& tx = txs_.at(id);
            put_lp(out, tx.id);
            put_u64(out, tx.submitted_at);
            put_lp(out, tx.owner);
            put_u64(out, tx.tags.size());
            for (const Tag& t : tx.tags) {
                put_lp(out, t.name);
                put_lp(out, t.value);
            }
            put_lp(out, tx.data);
        }
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(Errc::Internal, "cannot open " + path + " for writing");
    f.write(reinterpret_cast<const char*>(out.data()), std::streamsize(out.size()));
    if (!f) throw Error(Errc::Internal, "short write to " + path);
}

WeaveStore WeaveStore::load(const std::string& path, WeaveConfig config) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(Errc::CorruptSnapshot, "cannot open " + path);
    Bytes raw((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (raw.size() < kSnapshotMagic.size() ||
        std::string_view(reinterpret_cast<const char*>(raw.data()), kSnapshotMagic.size()) !=
            kSnapshotMagic)
        throw Error(Errc::CorruptSnapshot, "bad snapshot magic");

    WeaveStore store(config);
    Reader r(raw.data() + kSnapshotMagic.size(), raw.size() - kSnapshotMagic.size(),
             Errc::CorruptSnapshot);
    uint64_t block_count = r.u64();
    uint64_t max_stamp = 0;
    bool any_tx = false;
    for (uint64_t i = 0; i < block_count; ++i) {
        Block b;
        b.height = r.u64();
        if (r.u8()) b.prev_id = r.str();
        if (r.u8()) b.recall_id = r.str();
        b.block_id = r.str();
        uint64_t tx_count = r.u64();
        for (uint64_t t = 0; t < tx_count; ++t) {
            Transaction tx;
            tx.id = r.str();
            tx.submitted_at = r.u64();
            tx.owner = r.str();
            uint64_t tag_count = r.u64();
            for (uint64_t k = 0; k < tag_count; ++k) {
                std::string name = r.str();
                std::string value = r.str();
                tx.tags.push_back({std::move(name), std::move(value)});
            }
            tx.data = r.bytes();
            tx.fee = tx.data.size() * config.fee_per_byte;
            max_stamp = std::max(max_stamp, tx.submitted_at);
            any_tx = true;
            TxId id = tx.id;
            b.tx_ids.push_back(id);
            store.txs_[id] = std::move(tx);
        }
        store.blocks_.push_back(std::move(b));
    }
    if (!r.done()) throw Error(Errc::CorruptSnapshot, "trailing bytes after last block");
    store.clock_ = any_tx ? max_stamp + 1 : 0;
    for (const Block& b : store.blocks_)
        for (const TxId& id : b.tx_ids) store.index_bundle_locked(id);
    return store;
}

void WeaveStore::index_bundle_locked(const TxId& bundle_tx) {
    const Transaction& tx = txs_.at(bundle_tx);
    if (!has_tag(tx.tags, kBundleFormatTag, kBundleFormatValue)) return;
    try {
        std::vector<BundleItem> items = unbundle(tx);
        for (size_t i = 0; i < items.size(); ++i) items_[items[i].item_id] = {bundle_tx, i};
    } catch (const Error&) {
        // A malformed payload surfaces through verify_weave; it just cannot
        // be item-indexed.
    }
}

uint64_t WeaveStore::block_count() const {
    std::shared_lock lock(*mutex_);
    return blocks_.size();
}

size_t WeaveStore::sealed_tx_count() const {
    std::shared_lock lock(*mutex_);
    return txs_.size() - pending_.size();
}

size_t WeaveStore::pending_count() const {
    std::shared_lock lock(*mutex_);
    return pending_.size();
}

Block WeaveStore::block_at(uint64_t height) const {
    std::shared_lock lock(*mutex_);
    if (height >= blocks_.size())
        throw Error(Errc::NotFound, "no block at height " + std::to_string(height));
    return blocks_[height];
}

Block WeaveStore::tip() const {
    std::shared_lock lock(*mutex_);
    if (blocks_.empty()) throw Error(Errc::NotFound, "weave has no blocks yet");
    return blocks_.back();
}

uint64_t WeaveStore::now() const {
    std::shared_lock lock(*mutex_);
    return clock_;
}

}  // namespace permadid::weave
