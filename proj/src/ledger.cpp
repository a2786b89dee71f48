// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#include "redact/ledger.hpp"

#include "redact/crypto.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace redact {

namespace {

void write_list(ByteWriter& w, const std::vector<Digest>& list)
{
    if (list.size() > std::numeric_limits<std::uint16_t>::max()) {
        throw std::length_error("digest list exceeds 65535 entries");
    }
    w.u16(static_cast<std::uint16_t>(list.size()));
    for (const auto& d : list) w.digest(d);
}

std::vector<Digest> read_list(ByteReader& r)
{
    const auto n = r.u16();
    std::vector<Digest> out;
    out.reserve(n);
    for (std::uint16_t i = 0; i < n; ++i) out.push_back(r.digest());
    return out;
}

template <class T>
void push_unique(std::vector<T>& v, const T& x)
{
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

ChainValidation fail(std::uint64_t height, ChainViolation::Check check, std::string detail, std::size_t fallbacks)
{
    ChainValidation out;
    out.violation = ChainViolation{height, check, std::move(detail)};
    out.fallback_links = fallbacks;
    return out;
}

} // namespace

std::string_view consensus_name(Consensus c)
{
    return c == Consensus::ProofOfWork ? "pow" : "roundrobin";
}

Consensus parse_consensus(std::string_view name)
{
    if (name == "pow") return Consensus::ProofOfWork;
    if (name == "roundrobin") return Consensus::RoundRobin;
    throw std::invalid_argument("unknown consensus '" + std::string(name) + "'");
}

Digest merkle_root_of(std::span<const Digest> tx_hashes)
{
    if (tx_hashes.empty()) return inner_hash({});
    std::vector<Digest> level(tx_hashes.begin(), tx_hashes.end());
    do {
        if (level.size() % 2 == 1) level.push_back(level.back());
        std::vector<Digest> next;
        next.reserve(level.size() / 2);
        for (std::size_t i = 0; i < level.size(); i += 2) {
            next.push_back(Hasher().update(level[i].view()).update(level[i + 1].view()).finish());
        }
        level = std::move(next);
    } while (level.size() > 1);
    return level.front();
}

void sort_canonical(BlockBody& body)
{
    for (auto* list : {&body.account_tx_list, &body.funds_tx_list, &body.data_tx_list, &body.agg_tx_list,
                       &body.update_tx_list}) {
        std::sort(list->begin(), list->end());
    }
}

std::vector<Digest> ordered_tx_digests(const BlockBody& body)
{
    BlockBody sorted = body;
    sort_canonical(sorted);
    std::vector<Digest> out;
    for (const auto* list : {&sorted.account_tx_list, &sorted.funds_tx_list, &sorted.data_tx_list,
                             &sorted.agg_tx_list, &sorted.update_tx_list}) {
        out.insert(out.end(), list->begin(), list->end());
    }
    return out;
}

Bytes header_bytes(const Block& b)
{
    ByteWriter w;
    w.digest(b.prev_hash).digest(b.merkle_root).u64(b.height).u64(b.timestamp).u8(b.difficulty).u64(b.nonce).u16(
        b.nr_update_tx);
    return w.take();
}

Digest block_hash(const Block& b)
{
    return inner_hash(header_bytes(b));
}

Digest fallback_hash(const Block& b)
{
    ByteWriter w;
    w.digest(b.prev_hash).u64(b.height).u64(b.timestamp).u8(b.difficulty);
    return inner_hash(w.bytes());
}

bool meets_difficulty(const Digest& hash, unsigned leading_zero_bits)
{
    if (leading_zero_bits > Digest::size * 8) return false;
    unsigned full = leading_zero_bits / 8;
    for (unsigned i = 0; i < full; ++i) {
        if (hash[i] != 0) return false;
    }
    unsigned rest = leading_zero_bits % 8;
    return rest == 0 || (hash[full] >> (8 - rest)) == 0;
}

Bytes encode_block(const Block& b)
{
    ByteWriter w;
    w.raw(header_bytes(b));
    w.digest(b.fallback_prev);
    write_list(w, b.account_tx_list);
    write_list(w, b.funds_tx_list);
    write_list(w, b.data_tx_list);
    write_list(w, b.agg_tx_list);
    write_list(w, b.update_tx_list);
    return w.take();
}

Block decode_block(ByteView bytes)
{
    ByteReader r(bytes);
    Block b;
    b.prev_hash = r.digest();
    b.merkle_root = r.digest();
    b.height = r.u64();
    b.timestamp = r.u64();
    b.difficulty = r.u8();
    b.nonce = r.u64();
    b.nr_update_tx = r.u16();
    b.fallback_prev = r.digest();
    b.account_tx_list = read_list(r);
    b.funds_tx_list = read_list(r);
    b.data_tx_list = read_list(r);
    b.agg_tx_list = read_list(r);
    b.update_tx_list = read_list(r);
    r.expect_done();
    return b;
}

Block genesis_block()
{
    Block g;
    g.merkle_root = merkle_root_of({});
    return g;
}

Block mine_block(BlockBody body, const Block& prev, unsigned difficulty, std::uint64_t timestamp)
{
    if (difficulty > kMaxDifficulty) {
        throw std::invalid_argument("difficulty above " + std::to_string(kMaxDifficulty) + " bits");
    }
    sort_canonical(body);
    Block b;
    static_cast<BlockBody&>(b) = std::move(body);
    b.height = prev.height + 1;
    b.prev_hash = block_hash(prev);
    b.fallback_prev = fallback_hash(prev);
    b.timestamp = timestamp;
    b.difficulty = static_cast<std::uint8_t>(difficulty);
    if (b.update_tx_list.size() > std::numeric_limits<std::uint16_t>::max()) {
        throw std::length_error("too many UpdateTx for one block");
    }
    b.nr_update_tx = static_cast<std::uint16_t>(b.update_tx_list.size());
    b.merkle_root = merkle_root_of(ordered_tx_digests(b));

    Bytes header = header_bytes(b);
    constexpr std::size_t nonce_offset = 32 + 32 + 8 + 8 + 1;
    for (std::uint64_t nonce = 0;; ++nonce) {
        for (int i = 0; i < 8; ++i) header[nonce_offset + i] = static_cast<std::uint8_t>(nonce >> (56 - 8 * i));
        if (meets_difficulty(inner_hash(header), difficulty)) {
            b.nonce = nonce;
            return b;
        }
    }
}

std::string_view check_name(ChainViolation::Check check)
{
    using C = ChainViolation::Check;
    switch (check) {
    case C::Genesis: return "genesis";
    case C::Height: return "height";
    case C::PrevLink: return "prev_link";
    case C::FallbackLink: return "fallback_link";
    case C::UpdateCounter: return "update_counter";
    case C::MissingTx: return "missing_tx";
    case C::MerkleRoot: return "merkle_root";
    case C::Signature: return "signature";
    case C::ProofOfWork: return "proof_of_work";
    }
    return "unknown";
}

std::optional<Digest> recompute_merkle_root(const BlockBody& b, const TxSource& source, Digest* missing)
{
    std::vector<Digest> recomputed;
    for (const auto& listed : ordered_tx_digests(b)) {
        auto tx = source.find_tx(listed);
        std::optional<Digest> h;
        if (tx) h = tx_hash(*tx, source);
        if (!h) {
            if (missing) *missing = listed;
            return std::nullopt;
        }
        recomputed.push_back(*h);
    }
    return merkle_root_of(recomputed);
}

namespace {

// First body whose signature fails against the key the source knows.
std::optional<Digest> unsigned_body(const BlockBody& b, const TxSource& source)
{
    for (const auto& d : ordered_tx_digests(b)) {
        const auto tx = source.find_tx(d);
        if (!tx || std::holds_alternative<AggTx>(*tx)) continue;
        std::optional<Bytes> key;
        if (const auto* a = std::get_if<AccountTx>(&*tx)) {
            key = a->public_key;
        } else if (auto owner = owner_of(*tx)) {
            key = source.signing_key_of(*owner);
        }
        const auto params = hashing_parameters(*tx, source);
        if (!key || !params) continue;
        if (!verify_signature(*tx, *key, *params)) return d;
    }
    return std::nullopt;
}

} // namespace

ChainValidation validate_chain(std::span<const Block> chain, const TxSource& source)
{
    using C = ChainViolation::Check;
    std::size_t fallbacks = 0;
    if (chain.empty()) return fail(0, C::Genesis, "empty chain", 0);
    if (header_bytes(chain[0]) != header_bytes(genesis_block()) ||
        static_cast<const BlockBody&>(chain[0]) != BlockBody{}) {
        return fail(0, C::Genesis, "first block is not the genesis block", 0);
    }

    for (std::size_t i = 0; i < chain.size(); ++i) {
        const Block& b = chain[i];
        const Digest own_hash = block_hash(b);
        if (i > 0) {
            const Block& prev = chain[i - 1];
            if (b.height != prev.height + 1) return fail(b.height, C::Height, "height does not follow predecessor", fallbacks);
            if (b.fallback_prev != fallback_hash(prev)) {
                return fail(b.height, C::FallbackLink, "fallback link mismatch", fallbacks);
            }
            if (b.prev_hash != block_hash(prev)) {
                // The predecessor was compacted: its sealed hash survives only
                // as this block's prev_hash, which must still carry the proof.
                if (!meets_difficulty(b.prev_hash, prev.difficulty)) {
                    return fail(b.height, C::PrevLink, "prev link broken and fallback proof invalid", fallbacks);
                }
                ++fallbacks;
            }
        }
        if (b.nr_update_tx != b.update_tx_list.size()) {
            return fail(b.height, C::UpdateCounter, "nr_update_tx differs from update list length", fallbacks);
        }
        Digest missing;
        auto root = recompute_merkle_root(b, source, &missing);
        if (!root) return fail(b.height, C::MissingTx, "cannot resolve " + missing.hex(), fallbacks);
        if (*root != b.merkle_root) return fail(b.height, C::MerkleRoot, "recomputed Merkle root differs", fallbacks);
        if (auto bad = unsigned_body(b, source)) {
            return fail(b.height, C::Signature, "bad signature on " + bad->hex(), fallbacks);
        }

        const bool sealed_hash_elsewhere = i + 1 < chain.size() && chain[i + 1].prev_hash != own_hash;
        if (!sealed_hash_elsewhere && !meets_difficulty(own_hash, b.difficulty)) {
            return fail(b.height, C::ProofOfWork, "hash lacks required leading zero bits", fallbacks);
        }
    }
    ChainValidation ok;
    ok.fallback_links = fallbacks;
    return ok;
}

AggTx aggregate_funds(std::span<const FundsTx> txs, const AccountDirectory& accounts)
{
    if (txs.empty()) throw AggregationError("nothing to aggregate");
    const bool same_sender = std::all_of(txs.begin(), txs.end(), [&](const auto& t) { return t.from == txs[0].from; });
    const bool same_receiver = std::all_of(txs.begin(), txs.end(), [&](const auto& t) { return t.to == txs[0].to; });
    if (!same_sender && !same_receiver) throw AggregationError("funds transactions share neither sender nor receiver");

    AggTx agg;
    agg.kind = AggTx::Kind::Funds;
    for (const auto& t : txs) {
        push_unique(agg.from, t.from);
        push_unique(agg.to, t.to);
        if (agg.total_amount > std::numeric_limits<std::uint64_t>::max() - t.amount) {
            throw AggregationError("aggregated amount overflows");
        }
        agg.total_amount += t.amount;
        auto h = tx_hash(Transaction(t), accounts);
        if (!h) throw AggregationError("unknown sender account");
        agg.aggregated_hashes.push_back(*h);
    }
    return agg;
}

AggTx aggregate_data(std::span<const DataTx> txs, const AccountDirectory& accounts)
{
    if (txs.empty()) throw AggregationError("nothing to aggregate");
    for (const auto& t : txs) {
        if (t.from != txs[0].from) throw AggregationError("data transactions must share a sender");
        if (t.data != txs[0].data) throw AggregationError("data fields differ; aggregation would lose data");
    }
    AggTx agg;
    agg.kind = AggTx::Kind::Data;
    agg.from = {txs[0].from};
    agg.shared_data = txs[0].data;
    for (const auto& t : txs) {
        push_unique(agg.to, t.to);
        auto h = tx_hash(Transaction(t), accounts);
        if (!h) throw AggregationError("unknown sender account");
        agg.aggregated_hashes.push_back(*h);
    }
    return agg;
}

std::size_t remove_aggregated(Block& b, const std::set<Digest>& aggregated)
{
    std::size_t removed = 0;
    for (auto* list : {&b.funds_tx_list, &b.data_tx_list}) {
        const auto before = list->size();
        std::erase_if(*list, [&](const Digest& d) { return aggregated.count(d) > 0; });
        removed += before - list->size();
    }
    if (removed > 0) b.merkle_root = merkle_root_of(ordered_tx_digests(b));
    return removed;
}

} // namespace redact
