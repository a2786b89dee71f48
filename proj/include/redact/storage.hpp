// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#ifndef REDACT_STORAGE_HPP
#define REDACT_STORAGE_HPP

#include "redact/bytes.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

namespace redact {

namespace bucket {
inline constexpr std::string_view account_tx = "accounttx";
inline constexpr std::string_view funds_tx = "fundstx";
inline constexpr std::string_view data_tx = "datatx";
inline constexpr std::string_view agg_tx = "aggtx";
inline constexpr std::string_view update_tx = "updatetx";
inline constexpr std::string_view blocks = "blocks";
inline constexpr std::string_view accounts = "accounts";
inline constexpr std::string_view meta = "meta";

inline constexpr std::array<std::string_view, 8> all = {account_tx, funds_tx, data_tx, agg_tx,
                                                        update_tx,  blocks,   accounts, meta};
/// Buckets holding transaction bodies, searched in this order by get_tx_any.
inline constexpr std::array<std::string_view, 5> transactions = {account_tx, funds_tx, data_tx, agg_tx, update_tx};
} // namespace bucket

class StorageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bucketed key/value store, optionally backed by a single append-only file.
///
/// Keys are 32 bytes in every bucket except "meta". Writes go to memory and
/// are appended to the file on flush(); close() rewrites the file with only
/// the live records. Readers may run concurrently with each other; writes
/// are exclusive.
class Store {
public:
    /// In-memory store (no file).
    Store() = default;
    /// Opens or creates the file at `path` and replays its records.
    explicit Store(std::filesystem::path path);
    ~Store();

    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    /// Overwrites any existing value. Throws StorageError for an unknown
    /// bucket or a key of the wrong width.
    void put(std::string_view bucket, ByteView key, ByteView value);
    std::optional<Bytes> get(std::string_view bucket, ByteView key) const;
    bool contains(std::string_view bucket, ByteView key) const;

    struct Found {
        std::string bucket;
        Bytes value;
    };
    /// Looks `digest` up across the transaction buckets.
    std::optional<Found> get_tx_any(const Digest& digest) const;

    /// Visits entries in ascending key order.
    void for_each(std::string_view bucket, const std::function<void(ByteView key, ByteView value)>& fn) const;
    std::size_t size(std::string_view bucket) const;

    void flush();
    /// Flushes and compacts. The store stays usable in memory afterwards.
    void close();

    /// One line per entry, "bucket<TAB>key-hex<TAB>value-hex", buckets in
    /// fixed order and keys ascending.
    std::string dump() const;
    Digest dump_digest() const;

    const std::filesystem::path& path() const { return path_; }

private:
    using Table = std::map<Bytes, Bytes>;

    const Table& table(std::string_view bucket) const;
    Table& table(std::string_view bucket);
    void load();
    void write_record(Bytes& out, std::string_view bucket, ByteView key, ByteView value) const;

    std::filesystem::path path_;
    std::map<std::string, Table, std::less<>> tables_;
    Bytes pending_;
    mutable std::shared_mutex mutex_;
};

/// True when `bucket` is one of the eight known buckets.
bool is_known_bucket(std::string_view bucket);

} // namespace redact

#endif // REDACT_STORAGE_HPP
