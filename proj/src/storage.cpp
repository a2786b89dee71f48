// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#include "redact/storage.hpp"

#include "redact/crypto.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <mutex>

#include <fcntl.h>
#include <unistd.h>

namespace redact {

namespace {

void require_bucket(std::string_view bucket)
{
    if (!is_known_bucket(bucket)) throw StorageError("unknown bucket '" + std::string(bucket) + "'");
}

void require_key(std::string_view bucket, ByteView key)
{
    if (bucket != bucket::meta && key.size() != Digest::size) {
        throw StorageError("bucket '" + std::string(bucket) + "' requires 32-byte keys, got " +
                           std::to_string(key.size()));
    }
}

void fsync_path(const std::filesystem::path& path)
{
    int fd = ::open(path.c_str(), O_RDONLY);
    if (fd >= 0) {
        ::fsync(fd);
        ::close(fd);
    }
}

void append_file(const std::filesystem::path& path, ByteView bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw StorageError("write failed: " + path.string());
}

} // namespace

bool is_known_bucket(std::string_view bucket)
{
    return std::find(bucket::all.begin(), bucket::all.end(), bucket) != bucket::all.end();
}

Store::Store(std::filesystem::path path) : path_(std::move(path))
{
    load();
}

Store::~Store()
{
    try {
        close();
    } catch (...) {
        // destructors must not throw; an explicit close() reports errors
    }
}

const Store::Table& Store::table(std::string_view bucket) const
{
    static const Table empty;
    auto it = tables_.find(bucket);
    return it == tables_.end() ? empty : it->second;
}

Store::Table& Store::table(std::string_view bucket)
{
    auto it = tables_.find(bucket);
    if (it == tables_.end()) it = tables_.emplace(std::string(bucket), Table{}).first;
    return it->second;
}

void Store::write_record(Bytes& out, std::string_view bucket, ByteView key, ByteView value) const
{
    ByteWriter w;
    w.prefixed(ByteView(reinterpret_cast<const std::uint8_t*>(bucket.data()), bucket.size()));
    if (bucket == bucket::meta) {
        w.prefixed(key);
    } else {
        w.raw(key);
    }
    w.prefixed(value);
    const Bytes& rec = w.bytes();
    out.insert(out.end(), rec.begin(), rec.end());
}

void Store::load()
{
    if (path_.empty() || !std::filesystem::exists(path_)) return;
    std::ifstream in(path_, std::ios::binary);
    const Bytes raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    ByteReader r(raw);
    while (!r.done()) {
        try {
            const Bytes name = r.prefixed();
            const std::string bucket(name.begin(), name.end());
            require_bucket(bucket);
            Bytes key = bucket == bucket::meta ? r.prefixed() : Digest(r.digest()).to_bytes();
            Bytes value = r.prefixed();
            table(bucket)[std::move(key)] = std::move(value);
        } catch (const DecodeError&) {
            // torn record after the last flush boundary
            break;
        }
    }
}

void Store::put(std::string_view bucket, ByteView key, ByteView value)
{
    require_bucket(bucket);
    require_key(bucket, key);
    std::unique_lock lock(mutex_);
    table(bucket)[Bytes(key.begin(), key.end())] = Bytes(value.begin(), value.end());
    if (!path_.empty()) write_record(pending_, bucket, key, value);
}

std::optional<Bytes> Store::get(std::string_view bucket, ByteView key) const
{
    require_bucket(bucket);
    std::shared_lock lock(mutex_);
    const auto& t = table(bucket);
    auto it = t.find(Bytes(key.begin(), key.end()));
    if (it == t.end()) return std::nullopt;
    return it->second;
}

bool Store::contains(std::string_view bucket, ByteView key) const
{
    require_bucket(bucket);
    std::shared_lock lock(mutex_);
    const auto& t = table(bucket);
    return t.find(Bytes(key.begin(), key.end())) != t.end();
}

std::optional<Store::Found> Store::get_tx_any(const Digest& digest) const
{
    for (auto b : bucket::transactions) {
        if (auto v = get(b, digest.view())) return Found{std::string(b), std::move(*v)};
    }
    return std::nullopt;
}

void Store::for_each(std::string_view bucket, const std::function<void(ByteView, ByteView)>& fn) const
{
    require_bucket(bucket);
    std::shared_lock lock(mutex_);
    for (const auto& [k, v] : table(bucket)) fn(k, v);
}

std::size_t Store::size(std::string_view bucket) const
{
    require_bucket(bucket);
    std::shared_lock lock(mutex_);
    return table(bucket).size();
}

void Store::flush()
{
    std::unique_lock lock(mutex_);
    if (path_.empty() || pending_.empty()) return;
    append_file(path_, pending_);
    fsync_path(path_);
    pending_.clear();
}

void Store::close()
{
    std::unique_lock lock(mutex_);
    if (path_.empty()) return;
    Bytes all;
    for (auto b : bucket::all) {
        for (const auto& [k, v] : table(b)) write_record(all, b, k, v);
    }
    auto tmp = path_;
    tmp += ".compact";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(all.data()), static_cast<std::streamsize>(all.size()));
        out.flush();
        if (!out) throw StorageError("compaction write failed: " + tmp.string());
    }
    fsync_path(tmp);
    std::filesystem::rename(tmp, path_);
    pending_.clear();
}

std::string Store::dump() const
{
    std::shared_lock lock(mutex_);
    std::string out;
    for (auto b : bucket::all) {
        for (const auto& [k, v] : table(b)) {
            out.append(b);
            out.push_back('\t');
            out += to_hex(k);
            out.push_back('\t');
            out += to_hex(v);
            out.push_back('\n');
        }
    }
    return out;
}

Digest Store::dump_digest() const
{
    const std::string d = dump();
    return inner_hash(ByteView(reinterpret_cast<const std::uint8_t*>(d.data()), d.size()));
}

} // namespace redact
