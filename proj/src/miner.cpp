// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#include "redact/miner.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <tuple>

namespace redact {

namespace {

std::string_view bucket_for(TxType t)
{
    switch (t) {
    case TxType::Account: return bucket::account_tx;
    case TxType::Funds: return bucket::funds_tx;
    case TxType::Data: return bucket::data_tx;
    case TxType::Agg: return bucket::agg_tx;
    case TxType::Update: return bucket::update_tx;
    }
    throw std::logic_error("unknown transaction type");
}

std::string height_key(std::uint64_t h)
{
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return "height/" + std::string(buf);
}

Bytes u64_bytes(std::uint64_t v)
{
    ByteWriter w;
    w.u64(v);
    return w.take();
}

std::uint64_t read_u64(ByteView b)
{
    ByteReader r(b);
    auto v = r.u64();
    r.expect_done();
    return v;
}

ByteView as_view(const std::string& s)
{
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

bool add_overflows(std::uint64_t a, std::uint64_t b)
{
    return a > std::numeric_limits<std::uint64_t>::max() - b;
}

// State plus the account effects of transactions accepted earlier in the round.
class Overlay : public LedgerView {
public:
    Overlay(const NodeState& base, std::map<Address, Account>& accounts) : base_(base), accounts_(accounts) {}

    std::optional<Account> account(const Address& a) const override
    {
        auto it = accounts_.find(a);
        if (it != accounts_.end()) return it->second;
        return base_.account(a);
    }
    std::optional<Transaction> find_tx(const Digest& d) const override { return base_.find_tx(d); }

private:
    const NodeState& base_;
    std::map<Address, Account>& accounts_;
};

// Resolves hashing parameters from state and from AccountTxs not yet mined.
class PendingDirectory : public AccountDirectory {
public:
    explicit PendingDirectory(const NodeState& base) : base_(base) {}

    void add(const Transaction& tx)
    {
        if (const auto* a = std::get_if<AccountTx>(&tx)) pending_.emplace(a->issuer, a->parameters);
    }
    std::optional<chf::ChameleonParameters> parameters_of(const Address& a) const override
    {
        if (auto p = base_.parameters_of(a)) return p;
        auto it = pending_.find(a);
        if (it == pending_.end()) return std::nullopt;
        return it->second;
    }

private:
    const NodeState& base_;
    std::map<Address, chf::ChameleonParameters> pending_;
};

struct Planner {
    const NodeState& state;
    const NodeConfig& config;
    std::uint64_t round;
    RoundPlan plan;
    std::set<Digest> consumed;  // aggregated this round
    Overlay view{state, plan.accounts};

    void decide(const Digest& d, std::string step, std::string verdict)
    {
        plan.decisions.push_back({round, d, std::move(step), std::move(verdict)});
    }
    void reject(const Digest& d, std::string step, std::string reason) { decide(d, std::move(step), "reject:" + reason); }
    void accept(const Digest& d, const Transaction& tx, std::string step)
    {
        decide(d, std::move(step), "accept");
        plan.accepted.emplace_back(d, tx);
        switch (type_of(tx)) {
        case TxType::Account: plan.body.account_tx_list.push_back(d); break;
        case TxType::Funds: plan.body.funds_tx_list.push_back(d); break;
        case TxType::Data: plan.body.data_tx_list.push_back(d); break;
        case TxType::Agg: plan.body.agg_tx_list.push_back(d); break;
        case TxType::Update: plan.body.update_tx_list.push_back(d); break;
        }
    }

    void account_tx(const Digest& d, const AccountTx& t)
    {
        if (t.issuer != address_of(t.public_key)) return reject(d, "account.issuer", "issuer is not the key's address");
        if (t.parameters.tk) return reject(d, "account.params", "parameters carry a trapdoor");
        try {
            chf::validate_parameters(t.parameters);
        } catch (const chf::InvalidParameters& e) {
            return reject(d, "account.params", e.what());
        }
        if (view.account(t.issuer)) return reject(d, "account.exists", "account already exists");
        if (!verify_signature(t, t.public_key, t.parameters)) return reject(d, "account.signature", "bad signature");
        if (t.fee > config.initial_balance) return reject(d, "account.fee", "fee exceeds initial balance");
        plan.accounts[t.issuer] = Account{t.issuer, t.public_key, config.initial_balance - t.fee, 0, t.parameters};
        accept(d, t, "account.ok");
    }

    template <class T>
    void transfer(const Digest& d, const T& t, std::uint64_t amount, const std::string& kind)
    {
        auto from = view.account(t.from);
        if (!from) return reject(d, kind + ".sender", "unknown sender");
        if (!view.account(t.to)) return reject(d, kind + ".receiver", "unknown receiver");
        if (!verify_signature(t, from->signing_public_key, from->chf_parameters)) {
            return reject(d, kind + ".signature", "bad signature");
        }
        if (t.tx_cnt <= from->tx_cnt) return reject(d, kind + ".nonce", "tx_cnt not above account counter");
        if (add_overflows(amount, t.fee) || amount + t.fee > from->balance) {
            return reject(d, kind + ".balance", "insufficient balance");
        }
        if (t.from != t.to && add_overflows(view.account(t.to)->balance, amount)) {
            return reject(d, kind + ".balance", "receiver balance overflows");
        }
        from->balance -= amount + t.fee;
        from->tx_cnt = t.tx_cnt;
        plan.accounts[t.from] = *from;
        auto to = *view.account(t.to);
        to.balance += amount;
        plan.accounts[t.to] = to;
        accept(d, t, kind + ".ok");
    }

    void agg_tx(const Digest& d, const AggTx& t)
    {
        if (t.aggregated_hashes.empty()) return reject(d, "agg.hashes", "nothing aggregated");
        std::set<Digest> seen;
        std::vector<FundsTx> funds;
        std::vector<DataTx> data;
        for (const auto& h : t.aggregated_hashes) {
            if (!seen.insert(h).second || consumed.count(h)) return reject(d, "agg.hashes", "digest aggregated twice");
            auto body = state.find_tx(h);
            auto loc = state.tx_location(h);
            if (!body || !loc) return reject(d, "agg.hashes", "aggregated transaction not mined");
            const Block holder = state.block_at(*loc);
            const auto& list = t.kind == AggTx::Kind::Funds ? holder.funds_tx_list : holder.data_tx_list;
            if (std::find(list.begin(), list.end(), h) == list.end()) {
                return reject(d, "agg.hashes", "transaction already removed from its block");
            }
            if (t.kind == AggTx::Kind::Funds) {
                if (!std::holds_alternative<FundsTx>(*body)) return reject(d, "agg.kind", "not a funds transaction");
                funds.push_back(std::get<FundsTx>(*body));
            } else {
                if (!std::holds_alternative<DataTx>(*body)) return reject(d, "agg.kind", "not a data transaction");
                data.push_back(std::get<DataTx>(*body));
            }
        }
        AggTx expected;
        try {
            expected = t.kind == AggTx::Kind::Funds ? aggregate_funds(funds, view) : aggregate_data(data, view);
        } catch (const AggregationError& e) {
            return reject(d, "agg.rule", e.what());
        }
        if (!(expected == t)) return reject(d, "agg.rule", "aggregate does not match its transactions");
        consumed.insert(seen.begin(), seen.end());
        accept(d, t, "agg.ok");
    }

    void update_tx(const Digest& d, const UpdateTx& t)
    {
        const auto v = validate_update_tx(t, view, config);
        const std::string step = "update." + std::to_string(static_cast<int>(v));
        if (v != UpdateVerdict::Ok) return reject(d, step, std::string(verdict_name(v)));
        auto issuer = *view.account(t.issuer);
        issuer.balance -= t.fee;
        plan.accounts[t.issuer] = issuer;
        accept(d, t, "update.ok");
    }

    void run(const std::map<Digest, Transaction>& txs)
    {
        std::vector<std::pair<Digest, const Transaction*>> accounts, transfers, aggs, updates;
        for (const auto& [d, tx] : txs) {
            switch (type_of(tx)) {
            case TxType::Account: accounts.emplace_back(d, &tx); break;
            case TxType::Funds:
            case TxType::Data: transfers.emplace_back(d, &tx); break;
            case TxType::Agg: aggs.emplace_back(d, &tx); break;
            case TxType::Update: updates.emplace_back(d, &tx); break;
            }
        }
        auto key = [](const std::pair<Digest, const Transaction*>& e) {
            return std::visit(
                [&](const auto& t) -> std::tuple<Address, std::uint32_t, Digest> {
                    using T = std::decay_t<decltype(t)>;
                    if constexpr (std::is_same_v<T, FundsTx> || std::is_same_v<T, DataTx>) {
                        return {t.from, t.tx_cnt, e.first};
                    } else {
                        return {Address{}, 0, e.first};
                    }
                },
                *e.second);
        };
        std::sort(transfers.begin(), transfers.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });

        for (const auto* group : {&accounts, &transfers, &aggs, &updates}) {
            for (const auto& [d, tx] : *group) one(d, *tx);
        }
    }

    void one(const Digest& d, const Transaction& tx)
    {
        if (state.has_tx(d)) return reject(d, "duplicate", "already mined");
        auto recomputed = tx_hash(tx, view);
        if (!recomputed) return reject(d, "digest", "owner account unknown");
        if (*recomputed != d) return reject(d, "digest", "digest does not match body");
        std::visit(
            [&](const auto& t) {
                using T = std::decay_t<decltype(t)>;
                if constexpr (std::is_same_v<T, AccountTx>) account_tx(d, t);
                else if constexpr (std::is_same_v<T, FundsTx>) transfer(d, t, t.amount, "funds");
                else if constexpr (std::is_same_v<T, DataTx>) transfer(d, t, 0, "data");
                else if constexpr (std::is_same_v<T, AggTx>) agg_tx(d, t);
                else update_tx(d, t);
            },
            tx);
    }
};

} // namespace

std::optional<chf::ChameleonParameters> LedgerView::parameters_of(const Address& address) const
{
    auto a = account(address);
    if (!a) return std::nullopt;
    return a->chf_parameters;
}

std::optional<Bytes> LedgerView::signing_key_of(const Address& address) const
{
    auto a = account(address);
    if (!a) return std::nullopt;
    return a->signing_public_key;
}

// NodeState -------------------------------------------------------------------

NodeState::NodeState(Store& store) : store_(store)
{
    if (!meta("tip")) {
        const Block g = genesis_block();
        const Digest key = block_hash(g);
        store_.put(bucket::blocks, key.view(), encode_block(g));
        put_meta(height_key(0), key.view());
        put_meta("tip", u64_bytes(0));
    }
}

std::optional<Bytes> NodeState::meta(const std::string& key) const
{
    return store_.get(bucket::meta, as_view(key));
}

void NodeState::put_meta(const std::string& key, ByteView value)
{
    store_.put(bucket::meta, as_view(key), value);
}

std::optional<Account> NodeState::account(const Address& address) const
{
    auto v = store_.get(bucket::accounts, address.view());
    if (!v) return std::nullopt;
    return decode_account(*v);
}

void NodeState::put_account(const Account& account)
{
    store_.put(bucket::accounts, account.address.view(), encode_account(account));
}

std::optional<Transaction> NodeState::find_tx(const Digest& digest) const
{
    auto found = store_.get_tx_any(digest);
    if (!found) return std::nullopt;
    return decode_tx(found->value);
}

bool NodeState::has_tx(const Digest& digest) const
{
    return std::any_of(bucket::transactions.begin(), bucket::transactions.end(),
                       [&](auto b) { return store_.contains(b, digest.view()); });
}

void NodeState::put_tx(const Digest& digest, const Transaction& tx)
{
    store_.put(bucket_for(type_of(tx)), digest.view(), encode_tx(tx));
}

std::uint64_t NodeState::height() const
{
    return read_u64(*meta("tip"));
}

Digest NodeState::block_key(std::uint64_t height) const
{
    auto v = meta(height_key(height));
    if (!v) throw StorageError("no block at height " + std::to_string(height));
    return Digest::from_bytes(*v);
}

std::optional<Block> NodeState::block_by_key(const Digest& key) const
{
    auto v = store_.get(bucket::blocks, key.view());
    if (!v) return std::nullopt;
    return decode_block(*v);
}

Block NodeState::block_at(std::uint64_t height) const
{
    auto b = block_by_key(block_key(height));
    if (!b) throw StorageError("block body missing at height " + std::to_string(height));
    return *b;
}

Block NodeState::tip() const
{
    return block_at(height());
}

Digest NodeState::tip_hash() const
{
    return block_hash(tip());
}

Chain NodeState::chain() const
{
    Chain out;
    const auto h = height();
    out.reserve(h + 1);
    for (std::uint64_t i = 0; i <= h; ++i) out.push_back(block_at(i));
    return out;
}

void NodeState::append_block(const Block& block)
{
    if (block.height != height() + 1) throw StorageError("block height does not extend the tip");
    const Digest key = block_hash(block);
    store_.put(bucket::blocks, key.view(), encode_block(block));
    put_meta(height_key(block.height), key.view());
    put_meta("tip", u64_bytes(block.height));
}

void NodeState::replace_block(std::uint64_t height, const Block& block)
{
    store_.put(bucket::blocks, block_key(height).view(), encode_block(block));
}

std::optional<std::uint64_t> NodeState::tx_location(const Digest& digest) const
{
    auto v = meta("txloc/" + digest.hex());
    if (!v) return std::nullopt;
    return read_u64(*v);
}

// OpenTxPool ------------------------------------------------------------------

bool OpenTxPool::add(const Digest& digest, Transaction tx)
{
    std::lock_guard lock(mutex_);
    return pending_.emplace(digest, std::move(tx)).second;
}

bool OpenTxPool::contains(const Digest& digest) const
{
    std::lock_guard lock(mutex_);
    return pending_.count(digest) > 0;
}

std::size_t OpenTxPool::size() const
{
    std::lock_guard lock(mutex_);
    return pending_.size();
}

std::map<Digest, Transaction> OpenTxPool::snapshot() const
{
    std::lock_guard lock(mutex_);
    return pending_;
}

std::map<Digest, Transaction> OpenTxPool::take_all()
{
    std::lock_guard lock(mutex_);
    return std::exchange(pending_, {});
}

void OpenTxPool::erase(const Digest& digest)
{
    std::lock_guard lock(mutex_);
    pending_.erase(digest);
}

// Updates ---------------------------------------------------------------------

std::string_view verdict_name(UpdateVerdict v)
{
    switch (v) {
    case UpdateVerdict::Ok: return "ok";
    case UpdateVerdict::TargetMissing: return "target_missing";
    case UpdateVerdict::IssuerUnknown: return "issuer_unknown";
    case UpdateVerdict::BadSignature: return "bad_signature";
    case UpdateVerdict::NotOwner: return "not_owner";
    case UpdateVerdict::HashMismatch: return "hash_mismatch";
    case UpdateVerdict::ZeroFee: return "zero_fee";
    case UpdateVerdict::InsufficientFee: return "insufficient_fee";
    case UpdateVerdict::Duplicate: return "duplicate";
    }
    return "unknown";
}

UpdateVerdict validate_update_tx(const UpdateTx& u, const LedgerView& view, const NodeConfig& config)
{
    auto target = view.find_tx(u.tx_to_update_hash);
    if (!target) return UpdateVerdict::TargetMissing;

    auto issuer = view.account(u.issuer);
    if (!issuer) return UpdateVerdict::IssuerUnknown;

    if (!verify_signature(u, issuer->signing_public_key, issuer->chf_parameters)) return UpdateVerdict::BadSignature;

    if (!is_data_bearing(*target) || owner_of(*target) != u.issuer) return UpdateVerdict::NotOwner;

    auto params = hashing_parameters(*target, view);
    if (!params) return UpdateVerdict::HashMismatch;
    try {
        const Transaction updated = with_data(*target, u.tx_to_update_data, u.tx_to_update_check_string);
        if (tx_hash(updated, *params) != u.tx_to_update_hash) return UpdateVerdict::HashMismatch;
    } catch (const chf::InvalidCheckString&) {
        return UpdateVerdict::HashMismatch;
    }

    if (config.public_mode && u.fee == 0) return UpdateVerdict::ZeroFee;
    if (u.fee > issuer->balance) return UpdateVerdict::InsufficientFee;
    if (view.find_tx(tx_hash(u, issuer->chf_parameters))) return UpdateVerdict::Duplicate;
    return UpdateVerdict::Ok;
}

Digest process_update_tx(const UpdateTx& u, NodeState& state)
{
    auto target = state.find_tx(u.tx_to_update_hash);
    if (!target) throw StorageError("update target vanished: " + u.tx_to_update_hash.hex());
    state.put_tx(u.tx_to_update_hash, with_data(*target, u.tx_to_update_data, u.tx_to_update_check_string));
    return u.tx_to_update_hash;
}

// Rounds ----------------------------------------------------------------------

std::string format_decision(const Decision& d)
{
    return std::to_string(d.round) + '\t' + d.digest.hex() + '\t' + d.step + '\t' + d.verdict;
}

RoundPlan plan_round(const NodeState& state, const NodeConfig& config, const std::map<Digest, Transaction>& txs,
                     std::uint64_t round)
{
    Planner p{state, config, round, {}, {}};
    p.run(txs);
    sort_canonical(p.plan.body);
    return std::move(p.plan);
}

void commit_round(NodeState& state, const RoundPlan& plan, const Block& block)
{
    for (const auto& [address, account] : plan.accounts) state.put_account(account);

    std::map<std::uint64_t, std::set<Digest>> compaction;
    for (const auto& [d, tx] : plan.accepted) {
        state.put_tx(d, tx);
        const auto t = type_of(tx);
        if (t == TxType::Funds || t == TxType::Data) {
            state.store().put(bucket::meta, as_view("txloc/" + d.hex()), u64_bytes(block.height));
        }
        if (const auto* agg = std::get_if<AggTx>(&tx)) {
            for (const auto& h : agg->aggregated_hashes) compaction[*state.tx_location(h)].insert(h);
        }
    }
    // accepted updates are already in ascending digest order; last write wins
    for (const auto& [d, tx] : plan.accepted) {
        if (const auto* u = std::get_if<UpdateTx>(&tx)) process_update_tx(*u, state);
    }
    state.append_block(block);
    for (const auto& [height, digests] : compaction) {
        Block b = state.block_at(height);
        remove_aggregated(b, digests);
        state.replace_block(height, b);
    }
    state.store().flush();
}

MiningResult mining_round(OpenTxPool& pool, NodeState& state, const NodeConfig& config, std::uint64_t timestamp)
{
    const auto txs = pool.take_all();
    const Block prev = state.tip();
    RoundPlan plan = plan_round(state, config, txs, prev.height + 1);
    Block block = mine_block(plan.body, prev, config.block_difficulty(), timestamp);
    commit_round(state, plan, block);
    return {std::move(block), std::move(plan.decisions)};
}

BlockRejected::BlockRejected(std::uint64_t height, const std::string& reason)
    : std::runtime_error("block " + std::to_string(height) + " rejected: " + reason), height_(height)
{
}

std::vector<Decision> apply_block(NodeState& state, const NodeConfig& config, const Block& block,
                                  const std::map<Digest, Transaction>& bodies)
{
    const Block tip = state.tip();
    const auto h = block.height;
    if (h != tip.height + 1) throw BlockRejected(h, "height does not extend tip " + std::to_string(tip.height));
    if (block.prev_hash != block_hash(tip)) throw BlockRejected(h, "prev_hash does not link to the tip");
    if (block.fallback_prev != fallback_hash(tip)) throw BlockRejected(h, "fallback link mismatch");
    if (block.difficulty != config.block_difficulty()) throw BlockRejected(h, "unexpected difficulty");
    if (!meets_difficulty(block_hash(block), block.difficulty)) throw BlockRejected(h, "proof of work not met");
    if (block.nr_update_tx != block.update_tx_list.size()) throw BlockRejected(h, "nr_update_tx mismatch");

    PendingDirectory directory(state);
    std::map<Digest, Transaction> txs;
    const std::pair<const std::vector<Digest>*, TxType> lists[] = {
        {&block.account_tx_list, TxType::Account}, {&block.funds_tx_list, TxType::Funds},
        {&block.data_tx_list, TxType::Data},       {&block.agg_tx_list, TxType::Agg},
        {&block.update_tx_list, TxType::Update}};
    for (const auto& [list, type] : lists) {
        for (const auto& d : *list) {
            auto it = bodies.find(d);
            if (it == bodies.end()) throw BlockRejected(h, "missing body " + d.hex());
            if (type_of(it->second) != type) throw BlockRejected(h, "body in the wrong list " + d.hex());
            if (!txs.emplace(d, it->second).second) throw BlockRejected(h, "digest listed twice " + d.hex());
            directory.add(it->second);
        }
    }
    for (const auto& [d, tx] : txs) {
        if (tx_hash(tx, directory) != d) throw BlockRejected(h, "body does not hash to " + d.hex());
    }
    if (merkle_root_of(ordered_tx_digests(block)) != block.merkle_root) throw BlockRejected(h, "Merkle root mismatch");

    RoundPlan plan = plan_round(state, config, txs, h);
    for (const auto& d : plan.decisions) {
        if (!d.accepted()) throw BlockRejected(h, d.digest.hex() + " " + d.verdict);
    }
    commit_round(state, plan, block);
    return std::move(plan.decisions);
}

std::optional<Digest> pool_digest(const Transaction& tx, const NodeState& state, const OpenTxPool& pool)
{
    PendingDirectory directory(state);
    directory.add(tx);
    for (const auto& [d, pending] : pool.snapshot()) directory.add(pending);
    return tx_hash(tx, directory);
}

// Miner -----------------------------------------------------------------------

Miner::Miner(Store& store, NodeConfig config) : state_(store), config_(config) {}

std::optional<Digest> Miner::submit(const Transaction& tx)
{
    auto d = pool_digest(tx, state_, pool_);
    if (!d) throw TransactionError("cannot hash transaction: owner account unknown");
    if (state_.has_tx(*d) || !pool_.add(*d, tx)) return std::nullopt;
    return d;
}

MiningResult Miner::mine(std::uint64_t timestamp)
{
    auto r = mining_round(pool_, state_, config_, timestamp);
    record(r.decisions);
    return r;
}

void Miner::apply(const Block& block, const std::map<Digest, Transaction>& bodies)
{
    record(apply_block(state_, config_, block, bodies));
    for (const auto& d : ordered_tx_digests(block)) pool_.erase(d);
}

void Miner::record(const std::vector<Decision>& decisions)
{
    for (const auto& d : decisions) {
        log_.push_back(d);
        if (sink_) sink_(d);
    }
}

} // namespace redact
