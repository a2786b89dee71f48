// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#ifndef REDACT_LEDGER_HPP
#define REDACT_LEDGER_HPP

#include "redact/bytes.hpp"
#include "redact/transactions.hpp"

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace redact {

constexpr unsigned kMaxDifficulty = 24;

enum class Consensus { ProofOfWork, RoundRobin };

std::string_view consensus_name(Consensus c);
/// Accepts "pow" and "roundrobin". Throws std::invalid_argument otherwise.
Consensus parse_consensus(std::string_view name);

/// Transaction digests carried by a block, one list per transaction kind.
struct BlockBody {
    std::vector<Digest> account_tx_list;
    std::vector<Digest> funds_tx_list;
    std::vector<Digest> data_tx_list;
    std::vector<Digest> agg_tx_list;
    std::vector<Digest> update_tx_list;

    bool operator==(const BlockBody&) const = default;
};

/// Blocks store transaction digests only; bodies live in node storage, so
/// a Data-field update never touches a sealed block.
struct Block : BlockBody {
    Digest prev_hash;
    Digest fallback_prev;
    Digest merkle_root;
    std::uint64_t nonce = 0;
    std::uint8_t difficulty = 0;
    std::uint64_t height = 0;
    std::uint16_t nr_update_tx = 0;
    std::uint64_t timestamp = 0;

    bool operator==(const Block&) const = default;
};

using Chain = std::vector<Block>;

/// Binary Merkle tree over the given order; an odd node is paired with
/// itself and the empty list hashes to inner_hash("").
Digest merkle_root_of(std::span<const Digest> tx_hashes);

/// Every digest of the block in canonical order: account, funds, data, agg,
/// update; each list sorted by digest bytes.
std::vector<Digest> ordered_tx_digests(const BlockBody& body);
void sort_canonical(BlockBody& body);

/// prev_hash, merkle_root, height, timestamp, difficulty, nonce, nr_update_tx
/// as fixed-width big-endian fields.
Bytes header_bytes(const Block& b);
Digest block_hash(const Block& b);
/// Link that survives Merkle-root changes: prev_hash, height, timestamp, difficulty.
Digest fallback_hash(const Block& b);
bool meets_difficulty(const Digest& hash, unsigned leading_zero_bits);

/// Header, then fallback_prev, then the five digest lists each with a
/// 2-byte big-endian count.
Bytes encode_block(const Block& b);
Block decode_block(ByteView bytes);

Block genesis_block();

/// Seals `body` on top of `prev`: sorts lists, fills links and counters and
/// searches nonces from zero until the hash has `difficulty` leading zero
/// bits. Throws std::invalid_argument above kMaxDifficulty.
Block mine_block(BlockBody body, const Block& prev, unsigned difficulty, std::uint64_t timestamp);

/// Transaction bodies and account parameters needed to recompute digests.
class TxSource : public AccountDirectory {
public:
    virtual std::optional<Transaction> find_tx(const Digest& digest) const = 0;
    /// Signing public key of an account. Sources that cannot answer return
    /// nothing, and signatures of that account's transactions go unchecked.
    virtual std::optional<Bytes> signing_key_of(const Address&) const { return std::nullopt; }
};

struct ChainViolation {
    enum class Check { Genesis, Height, PrevLink, FallbackLink, UpdateCounter, MissingTx, MerkleRoot, Signature, ProofOfWork };
    std::uint64_t height = 0;
    Check check = Check::Genesis;
    std::string detail;
};

std::string_view check_name(ChainViolation::Check check);

struct ChainValidation {
    std::optional<ChainViolation> violation;
    /// Links accepted through fallback_prev because the predecessor was compacted.
    std::size_t fallback_links = 0;

    bool ok() const { return !violation.has_value(); }
    explicit operator bool() const { return ok(); }
};

/// Checks, block by block: height sequence, both links, the UpdateTx
/// counter, the Merkle root recomputed from freshly computed chameleon
/// hashes of the stored bodies, body signatures (where the source knows the
/// signing key) and the leading-zero proof. Reports the
/// first violation by height.
ChainValidation validate_chain(std::span<const Block> chain, const TxSource& source);

/// Recomputes the Merkle root of `b` from the bodies in `source`. Empty
/// optional (with `missing` set) when a body or its account is unavailable.
std::optional<Digest> recompute_merkle_root(const BlockBody& b, const TxSource& source, Digest* missing = nullptr);

class AggregationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Merges funds transactions sharing a sender, or sharing a receiver.
AggTx aggregate_funds(std::span<const FundsTx> txs, const AccountDirectory& accounts);
/// Merges data transactions with one sender and byte-identical data.
AggTx aggregate_data(std::span<const DataTx> txs, const AccountDirectory& accounts);

/// Drops aggregated digests from the funds and data lists of `b` and
/// refreshes its Merkle root. Returns the number removed. The block's hash
/// changes; its successor stays linked through fallback_prev.
std::size_t remove_aggregated(Block& b, const std::set<Digest>& aggregated);

} // namespace redact

#endif // REDACT_LEDGER_HPP
