// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#ifndef REDACT_MINER_HPP
#define REDACT_MINER_HPP

#include "redact/ledger.hpp"
#include "redact/storage.hpp"
#include "redact/transactions.hpp"

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace redact {

struct NodeConfig {
    /// Public nodes refuse UpdateTx with a zero fee.
    bool public_mode = false;
    /// Coins credited to every account when its AccountTx is mined.
    std::uint64_t initial_balance = 1000;
    Consensus consensus = Consensus::ProofOfWork;
    /// Leading zero bits for proof-of-work; ignored for round-robin.
    unsigned difficulty = 8;

    unsigned block_difficulty() const { return consensus == Consensus::ProofOfWork ? difficulty : 0; }
};

/// Read access to accounts and stored transactions.
class LedgerView : public TxSource {
public:
    virtual std::optional<Account> account(const Address& address) const = 0;

    std::optional<chf::ChameleonParameters> parameters_of(const Address& address) const override;
    std::optional<Bytes> signing_key_of(const Address& address) const override;
};

/// Chain and account state persisted in a Store.
///
/// Meta keys: "tip" holds the height, "height/<16 hex digits>" the block
/// key at that height, "txloc/<digest hex>" the height that mined a funds or
/// data transaction. Blocks keep the key they were sealed under even after
/// compaction.
class NodeState : public LedgerView {
public:
    /// Writes the genesis block into an empty store.
    explicit NodeState(Store& store);

    Store& store() { return store_; }
    const Store& store() const { return store_; }

    std::optional<Account> account(const Address& address) const override;
    void put_account(const Account& account);

    std::optional<Transaction> find_tx(const Digest& digest) const override;
    bool has_tx(const Digest& digest) const;
    /// Stores under the bucket of the transaction's type, overwriting.
    void put_tx(const Digest& digest, const Transaction& tx);

    std::uint64_t height() const;
    Block block_at(std::uint64_t height) const;
    /// Key the block at `height` was sealed under.
    Digest block_key(std::uint64_t height) const;
    std::optional<Block> block_by_key(const Digest& key) const;
    Block tip() const;
    Digest tip_hash() const;
    Chain chain() const;

    void append_block(const Block& block);
    /// Overwrites the block at `height` in place (same key).
    void replace_block(std::uint64_t height, const Block& block);

    std::optional<std::uint64_t> tx_location(const Digest& digest) const;

private:
    std::optional<Bytes> meta(const std::string& key) const;
    void put_meta(const std::string& key, ByteView value);

    Store& store_;
};

/// Pending transactions keyed by digest. Safe for concurrent submitters.
class OpenTxPool {
public:
    /// False when the digest is already pending.
    bool add(const Digest& digest, Transaction tx);
    bool contains(const Digest& digest) const;
    std::size_t size() const;
    std::map<Digest, Transaction> snapshot() const;
    /// Removes and returns everything pending.
    std::map<Digest, Transaction> take_all();
    void erase(const Digest& digest);

private:
    mutable std::mutex mutex_;
    std::map<Digest, Transaction> pending_;
};

enum class UpdateVerdict {
    Ok = 0,
    TargetMissing = 1,
    IssuerUnknown = 2,
    BadSignature = 3,
    NotOwner = 4,
    HashMismatch = 5,
    ZeroFee = 6,
    InsufficientFee = 7,
    Duplicate = 8,
};

std::string_view verdict_name(UpdateVerdict v);

/// Steps 1-5 in order (target stored, issuer known, signature, ownership,
/// hash equality), then the node policy checks. First failure wins.
UpdateVerdict validate_update_tx(const UpdateTx& u, const LedgerView& view, const NodeConfig& config);

/// Copies the new data and check string into the stored target, keeping its
/// key. Returns that key.
Digest process_update_tx(const UpdateTx& u, NodeState& state);

/// One validation decision, logged as "round<TAB>digest<TAB>step<TAB>verdict".
struct Decision {
    std::uint64_t round = 0;
    Digest digest;
    std::string step;
    std::string verdict;  // "accept" or "reject:<reason>"

    bool accepted() const { return verdict == "accept"; }
};

std::string format_decision(const Decision& d);

/// Outcome of validating a batch of transactions against state.
struct RoundPlan {
    BlockBody body;
    std::vector<Decision> decisions;
    std::vector<std::pair<Digest, Transaction>> accepted;  // in execution order
    std::map<Address, Account> accounts;                   // touched accounts, final values
};

/// Validates `txs` in execution order (accounts, then funds and data by
/// sender and counter, then aggregates, then updates) against `state` plus
/// the effects of earlier accepted transactions.
RoundPlan plan_round(const NodeState& state, const NodeConfig& config, const std::map<Digest, Transaction>& txs,
                     std::uint64_t round);

/// Persists a plan sealed as `block`: accounts, bodies, update overwrites in
/// ascending digest order, aggregation compaction, and the block itself.
void commit_round(NodeState& state, const RoundPlan& plan, const Block& block);

struct MiningResult {
    Block block;
    std::vector<Decision> decisions;
};

/// Drains the pool, validates everything, applies valid updates and seals a
/// block (possibly empty). Invalid transactions are dropped.
MiningResult mining_round(OpenTxPool& pool, NodeState& state, const NodeConfig& config, std::uint64_t timestamp);

class BlockRejected : public std::runtime_error {
public:
    BlockRejected(std::uint64_t height, const std::string& reason);
    std::uint64_t height() const { return height_; }

private:
    std::uint64_t height_;
};

/// Applies a block sealed elsewhere. Every listed body must be supplied (or
/// already stored for updates' targets), recompute to its digest and pass
/// validation. Throws BlockRejected otherwise; state is untouched then.
std::vector<Decision> apply_block(NodeState& state, const NodeConfig& config, const Block& block,
                                  const std::map<Digest, Transaction>& bodies);

/// Digest of a transaction that may come from an account created by a
/// pending AccountTx. Empty when the owner is unknown.
std::optional<Digest> pool_digest(const Transaction& tx, const NodeState& state, const OpenTxPool& pool);

/// A node: state, pool and a decision log.
class Miner {
public:
    Miner(Store& store, NodeConfig config);

    NodeState& state() { return state_; }
    const NodeState& state() const { return state_; }
    OpenTxPool& pool() { return pool_; }
    const OpenTxPool& pool() const { return pool_; }
    const NodeConfig& config() const { return config_; }
    const std::vector<Decision>& log() const { return log_; }
    void set_log_sink(std::function<void(const Decision&)> sink) { sink_ = std::move(sink); }

    /// Adds to the pool. Empty when already pending or mined. Throws
    /// TransactionError when the digest cannot be computed.
    std::optional<Digest> submit(const Transaction& tx);
    MiningResult mine(std::uint64_t timestamp);
    void apply(const Block& block, const std::map<Digest, Transaction>& bodies);

private:
    void record(const std::vector<Decision>& decisions);

    NodeState state_;
    OpenTxPool pool_;
    NodeConfig config_;
    std::vector<Decision> log_;
    std::function<void(const Decision&)> sink_;
};

} // namespace redact

#endif // REDACT_MINER_HPP
