// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#include "redact/network.hpp"

#include "redact/crypto.hpp"

#include <algorithm>

namespace redact::net {

namespace {

constexpr unsigned kMaxRetries = 20;

bool known_code(std::uint8_t c)
{
    return c >= static_cast<std::uint8_t>(Code::ReqBlock) && c <= static_cast<std::uint8_t>(Code::ResChainTip);
}

} // namespace

std::string_view code_name(Code code)
{
    switch (code) {
    case Code::ReqBlock: return "ReqBlock";
    case Code::ResBlock: return "ResBlock";
    case Code::ReqTx: return "ReqTx";
    case Code::ResTx: return "ResTx";
    case Code::ReqUpdateTx: return "ReqUpdateTx";
    case Code::ResUpdateTx: return "ResUpdateTx";
    case Code::BroadcastTx: return "BroadcastTx";
    case Code::BroadcastBlock: return "BroadcastBlock";
    case Code::ReqChainTip: return "ReqChainTip";
    case Code::ResChainTip: return "ResChainTip";
    }
    return "Unknown";
}

Bytes encode_frame(const Message& m)
{
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(m.code));
    w.prefixed(m.payload);
    return w.take();
}

Message decode_frame(ByteView frame)
{
    ByteReader r(frame);
    const auto code = r.u8();
    if (!known_code(code)) throw DecodeError("unknown message code " + std::to_string(code));
    Message m{static_cast<Code>(code), r.prefixed()};
    r.expect_done();
    return m;
}

Message req_block(std::uint64_t height)
{
    ByteWriter w;
    w.u64(height);
    return {Code::ReqBlock, w.take()};
}

Message res_block(std::uint64_t height, const std::optional<Block>& block)
{
    ByteWriter w;
    w.u64(height).u8(block ? 1 : 0);
    if (block) w.raw(encode_block(*block));
    return {Code::ResBlock, w.take()};
}

Message req_tx(const Digest& digest, bool update_bucket)
{
    return {update_bucket ? Code::ReqUpdateTx : Code::ReqTx, digest.to_bytes()};
}

Message res_tx(const Digest& digest, const std::optional<Transaction>& tx, bool update_bucket)
{
    ByteWriter w;
    w.digest(digest).u8(tx ? 1 : 0);
    if (tx) w.raw(encode_tx(*tx));
    return {update_bucket ? Code::ResUpdateTx : Code::ResTx, w.take()};
}

Message broadcast_tx_msg(const Transaction& tx)
{
    return {Code::BroadcastTx, encode_tx(tx)};
}

Message broadcast_block_msg(const Block& block)
{
    return {Code::BroadcastBlock, encode_block(block)};
}

Message req_chain_tip()
{
    return {Code::ReqChainTip, {}};
}

Message res_chain_tip(std::uint64_t height, const Digest& tip)
{
    ByteWriter w;
    w.u64(height).digest(tip);
    return {Code::ResChainTip, w.take()};
}

std::string format_trace(const TraceEntry& e)
{
    return std::to_string(e.tick) + '\t' + e.from + '\t' + e.to + '\t' + std::string(code_name(e.code)) + '\t' +
           e.frame_digest.hex() + '\t' + (e.dropped ? "dropped" : "sent");
}

SyncAborted::SyncAborted(std::uint64_t height, const std::string& reason)
    : std::runtime_error("sync aborted at height " + std::to_string(height) + ": " + reason), height_(height)
{
}

struct SimNetwork::Node {
    NodeId id;
    // replaced wholesale when the node switches to a better chain
    std::unique_ptr<Store> store;
    std::unique_ptr<Miner> miner;
    bool online = true;
    std::vector<NodeId> peers;

    // block being assembled
    std::optional<Block> pending;
    NodeId pending_from;
    bool pending_relay = false;
    std::map<Digest, Transaction> gathered;
    std::map<Digest, bool> missing;  // digest -> lives in the update bucket

    // catch-up
    std::map<NodeId, std::uint64_t> peer_tip;
    std::optional<std::pair<NodeId, std::uint64_t>> awaiting_block;
    std::optional<NodeId> sync_peer;
    bool tip_known = false;

    unsigned retries = 0;
    bool timer_armed = false;
    std::optional<std::pair<std::uint64_t, std::string>> error;
    std::map<Digest, std::optional<Transaction>> update_answers;
    std::vector<Transaction> orphans;  // resubmitted once the new chain is in

    Node(NodeId i, const NodeConfig& c)
        : id(std::move(i)), store(std::make_unique<Store>()), miner(std::make_unique<Miner>(*store, c))
    {
    }
};

struct SimNetwork::Event {
    std::uint64_t tick = 0;
    NodeId from;
    NodeId to;
    Bytes frame;
    std::function<void()> action;  // set for local timers and scheduled commands
};

SimNetwork::SimNetwork(std::uint64_t seed, NodeConfig config) : config_(config), rng_(seed) {}

SimNetwork::~SimNetwork() = default;

void SimNetwork::add_node(const NodeId& id, bool online)
{
    if (nodes_.count(id)) throw std::invalid_argument("duplicate node '" + id + "'");
    auto n = std::make_unique<Node>(id, config_);
    n->online = online;
    nodes_.emplace(id, std::move(n));
}

void SimNetwork::connect(const NodeId& a, const NodeId& b, Link link)
{
    if (a == b) throw std::invalid_argument("self link on '" + a + "'");
    auto& na = node(a);
    auto& nb = node(b);
    if (!links_.count({a, b})) {
        na.peers.push_back(b);
        nb.peers.push_back(a);
    }
    links_[{a, b}] = link;
    links_[{b, a}] = link;
}

std::vector<NodeId> SimNetwork::node_ids() const
{
    std::vector<NodeId> out;
    for (const auto& [id, n] : nodes_) out.push_back(id);
    return out;
}

bool SimNetwork::has_node(const NodeId& id) const
{
    return nodes_.count(id) > 0;
}

SimNetwork::Node& SimNetwork::node(const NodeId& id)
{
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw std::invalid_argument("unknown node '" + id + "'");
    return *it->second;
}

const SimNetwork::Node& SimNetwork::node(const NodeId& id) const
{
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw std::invalid_argument("unknown node '" + id + "'");
    return *it->second;
}

Miner& SimNetwork::miner(const NodeId& id)
{
    return *node(id).miner;
}

Store& SimNetwork::store(const NodeId& id)
{
    return *node(id).store;
}

bool SimNetwork::online(const NodeId& id) const
{
    return node(id).online;
}

void SimNetwork::set_online(const NodeId& id, bool online)
{
    node(id).online = online;
}

void SimNetwork::push(Event e)
{
    const auto key = std::make_pair(e.tick, seq_++);
    queue_.emplace(key, std::move(e));
}

void SimNetwork::send(const NodeId& from, const NodeId& to, const Message& m)
{
    auto it = links_.find({from, to});
    if (it == links_.end()) throw std::invalid_argument("no link " + from + " -> " + to);
    const Link& link = it->second;
    Bytes frame = encode_frame(m);
    const bool dropped = link.drop > 0 && rng_.unit() < link.drop;
    trace_.push_back({now_, from, to, m.code, inner_hash(frame), dropped});
    if (dropped) return;
    auto& clock = link_clock_[{from, to}];
    clock = std::max(clock, now_ + link.delay);
    push({clock, from, to, std::move(frame), {}});
}

void SimNetwork::schedule(std::uint64_t tick, std::function<void()> action)
{
    push({std::max(tick, now_), {}, {}, {}, std::move(action)});
}

bool SimNetwork::step()
{
    if (queue_.empty()) return false;
    auto it = queue_.begin();
    Event e = std::move(it->second);
    queue_.erase(it);
    now_ = std::max(now_, e.tick);
    if (e.action) {
        e.action();
        return true;
    }
    Node& n = node(e.to);
    if (!n.online) return true;
    try {
        deliver(n, e.from, decode_frame(e.frame));
    } catch (const DecodeError&) {
        // malformed traffic is ignored
    }
    return true;
}

void SimNetwork::run_until_quiet(std::uint64_t max_ticks)
{
    const auto deadline = now_ + max_ticks;
    while (!queue_.empty() && queue_.begin()->first.first <= deadline) step();
}

void SimNetwork::run_until(std::uint64_t tick)
{
    while (!queue_.empty() && queue_.begin()->first.first <= tick) step();
    now_ = std::max(now_, tick);
}

bool SimNetwork::quiet() const
{
    return queue_.empty();
}

void SimNetwork::deliver(Node& n, const NodeId& from, const Message& m)
{
    const NodeState& state = n.miner->state();
    ByteReader r(m.payload);
    switch (m.code) {
    case Code::ReqBlock: {
        const auto h = r.u64();
        std::optional<Block> b;
        if (h <= state.height()) b = state.block_at(h);
        send(n.id, from, res_block(h, b));
        break;
    }
    case Code::ResBlock: {
        const auto h = r.u64();
        const bool present = r.u8() != 0;
        if (n.awaiting_block && n.awaiting_block->first == from && n.awaiting_block->second == h) {
            n.awaiting_block.reset();
            n.retries = 0;
        }
        if (present) receive_block(n, from, decode_block(r.raw(r.remaining())), false);
        break;
    }
    case Code::ReqTx:
    case Code::ReqUpdateTx: {
        const Digest d = r.digest();
        const bool update = m.code == Code::ReqUpdateTx;
        std::optional<Transaction> tx;
        if (update) {
            if (auto v = n.store->get(bucket::update_tx, d.view())) tx = decode_tx(*v);
        } else {
            tx = state.find_tx(d);
            if (!tx) {
                auto pool = n.miner->pool().snapshot();
                if (auto it = pool.find(d); it != pool.end()) tx = it->second;
            }
        }
        send(n.id, from, res_tx(d, tx, update));
        break;
    }
    case Code::ResTx:
    case Code::ResUpdateTx: {
        const Digest d = r.digest();
        std::optional<Transaction> tx;
        if (r.u8() != 0) tx = decode_tx(r.raw(r.remaining()));
        if (m.code == Code::ResUpdateTx) n.update_answers[d] = tx;
        receive_body(n, d, tx);
        break;
    }
    case Code::BroadcastTx:
        receive_tx(n, from, decode_tx(m.payload));
        break;
    case Code::BroadcastBlock:
        receive_block(n, from, decode_block(m.payload), true);
        break;
    case Code::ReqChainTip:
        send(n.id, from, res_chain_tip(state.height(), state.tip_hash()));
        break;
    case Code::ResChainTip: {
        const auto h = r.u64();
        const Digest peer_tip = r.digest();
        if (h == state.height() && peer_tip < state.tip_hash() && !syncing(n.id) && !n.error && !n.pending) {
            adopt_chain_of(n, from);
            break;
        }
        auto& tip = n.peer_tip[from];
        tip = std::max(tip, h);
        if (n.sync_peer == from) n.tip_known = true;
        request_next(n);
        break;
    }
    }
}

void SimNetwork::receive_tx(Node& n, const NodeId& from, const Transaction& tx)
{
    std::optional<Digest> d;
    try {
        d = n.miner->submit(tx);
    } catch (const TransactionError&) {
        return;  // owner unknown here; the origin's retries may fix it
    }
    if (d) flood(n.id, tx, from);
}

void SimNetwork::flood(const NodeId& origin, const Transaction& tx, const NodeId& except)
{
    const Message m = broadcast_tx_msg(tx);
    for (const auto& p : node(origin).peers) {
        if (p != except) send(origin, p, m);
    }
}

void SimNetwork::receive_block(Node& n, const NodeId& from, const Block& b, bool relay)
{
    const auto h = n.miner->state().height();
    const Digest own_tip = n.miner->state().tip_hash();
    // longest chain wins; at equal height the lower tip digest does
    if (!n.error && !n.pending) {
        const bool sync_source = !syncing(n.id) || n.sync_peer == from;
        if (b.height == h + 1 && b.prev_hash != own_tip && sync_source) {
            adopt_chain_of(n, from);
            return;
        }
        if (b.height == h && h > 0 && !syncing(n.id) && block_hash(b) < own_tip) {
            adopt_chain_of(n, from);
            return;
        }
    }
    if (b.height <= h) return;
    auto& tip = n.peer_tip[from];
    tip = std::max(tip, b.height);
    if (n.pending) return;
    if (b.height > h + 1) {
        request_next(n);
        return;
    }
    n.pending = b;
    n.pending_from = from;
    n.pending_relay = relay;
    n.gathered.clear();
    n.missing.clear();
    n.retries = 0;
    const auto pool = n.miner->pool().snapshot();
    const std::pair<const std::vector<Digest>*, bool> lists[] = {{&b.account_tx_list, false},
                                                                 {&b.funds_tx_list, false},
                                                                 {&b.data_tx_list, false},
                                                                 {&b.agg_tx_list, false},
                                                                 {&b.update_tx_list, true}};
    for (const auto& [list, update] : lists) {
        for (const auto& d : *list) {
            if (auto it = pool.find(d); it != pool.end()) {
                n.gathered.emplace(d, it->second);
            } else if (auto stored = n.miner->state().find_tx(d)) {
                n.gathered.emplace(d, *stored);
            } else {
                n.missing.emplace(d, update);
            }
        }
    }
    if (n.missing.empty()) {
        finish_block(n);
    } else {
        request_missing(n);
        arm_timer(n);
    }
}

void SimNetwork::request_missing(Node& n)
{
    for (const auto& [d, update] : n.missing) send(n.id, n.pending_from, req_tx(d, update));
}

void SimNetwork::receive_body(Node& n, const Digest& d, const std::optional<Transaction>& tx)
{
    if (!n.pending || !n.missing.count(d)) return;
    if (!tx) {
        n.error = {n.pending->height, "peer lacks body " + d.hex()};
        n.pending.reset();
        return;
    }
    n.gathered[d] = *tx;
    n.missing.erase(d);
    if (n.missing.empty()) finish_block(n);
}

void SimNetwork::finish_block(Node& n)
{
    const Block b = *n.pending;
    n.pending.reset();
    n.retries = 0;
    auto bodies = std::move(n.gathered);
    n.gathered.clear();
    try {
        n.miner->apply(b, bodies);
    } catch (const BlockRejected& e) {
        n.error = {e.height(), e.what()};
        return;
    }
    if (n.pending_relay) {
        const Message m = broadcast_block_msg(b);
        for (const auto& p : n.peers) {
            if (p != n.pending_from) send(n.id, p, m);
        }
    }
    appended(n, b);
    request_next(n);
    if (!n.orphans.empty() && !syncing(n.id)) resubmit_orphans(n);
}

void SimNetwork::adopt_chain_of(Node& n, const NodeId& peer)
{
    const NodeState& state = n.miner->state();
    for (std::uint64_t h = 1; h <= state.height(); ++h) {
        const Block b = state.block_at(h);
        for (const auto* list : {&b.account_tx_list, &b.funds_tx_list, &b.data_tx_list, &b.agg_tx_list,
                                 &b.update_tx_list}) {
            for (const auto& d : *list) {
                if (auto tx = state.find_tx(d)) n.orphans.push_back(*tx);
            }
        }
    }
    for (const auto& [d, tx] : n.miner->pool().snapshot()) n.orphans.push_back(tx);

    n.miner.reset();
    n.store = std::make_unique<Store>();
    n.miner = std::make_unique<Miner>(*n.store, config_);
    n.pending.reset();
    n.gathered.clear();
    n.missing.clear();
    n.awaiting_block.reset();
    n.retries = 0;
    n.sync_peer = peer;
    n.tip_known = false;
    send(n.id, peer, req_chain_tip());
    arm_timer(n);
}

void SimNetwork::resubmit_orphans(Node& n)
{
    for (const auto& tx : std::exchange(n.orphans, {})) {
        std::optional<Digest> d;
        try {
            d = n.miner->submit(tx);
        } catch (const std::exception&) {
            continue;  // no longer valid on the adopted chain
        }
        if (d) flood(n.id, tx, {});
    }
}

void SimNetwork::request_next(Node& n)
{
    if (n.pending || n.awaiting_block) return;
    const auto h = n.miner->state().height();
    std::optional<NodeId> best;
    std::uint64_t best_tip = h;
    if (n.sync_peer && n.peer_tip[*n.sync_peer] > h) {
        best = n.sync_peer;
    } else {
        for (const auto& [peer, tip] : n.peer_tip) {
            if (tip > best_tip) {
                best = peer;
                best_tip = tip;
            }
        }
    }
    if (!best) return;
    n.awaiting_block = {*best, h + 1};
    send(n.id, *best, req_block(h + 1));
    arm_timer(n);
}

void SimNetwork::arm_timer(Node& n)
{
    if (n.timer_armed) return;
    n.timer_armed = true;
    std::uint64_t slowest = 0;
    for (const auto& [key, link] : links_) {
        if (key.first == n.id) slowest = std::max(slowest, link.delay);
    }
    Node* np = &n;
    schedule(now_ + 4 * slowest + 100, [this, np] {
        Node& m = *np;
        m.timer_armed = false;
        if (!m.online) return;
        const bool waiting_tip = m.sync_peer && !m.tip_known;
        if (!m.pending && !m.awaiting_block && !waiting_tip) return;
        if (++m.retries > kMaxRetries) {
            if (m.pending) m.error = {m.pending->height, "timed out fetching bodies"};
            m.pending.reset();
            m.awaiting_block.reset();
            m.retries = 0;
            return;
        }
        if (m.pending) request_missing(m);
        if (m.awaiting_block) send(m.id, m.awaiting_block->first, req_block(m.awaiting_block->second));
        if (waiting_tip) send(m.id, *m.sync_peer, req_chain_tip());
        arm_timer(m);
    });
}

void SimNetwork::appended(Node& n, const Block& b)
{
    if (block_hook_) block_hook_(n.id, b);
}

bool SimNetwork::knows_tx(const NodeId& id, const Digest& digest) const
{
    const Node& n = node(id);
    return n.miner->pool().contains(digest) || n.miner->state().has_tx(digest);
}

std::size_t SimNetwork::broadcast_tx(const NodeId& origin, const Transaction& tx, unsigned retries)
{
    Node& o = node(origin);
    const auto d = pool_digest(tx, o.miner->state(), o.miner->pool());
    if (!d) throw TransactionError("origin cannot hash the transaction");
    o.miner->submit(tx);
    flood(origin, tx, {});
    run_until_quiet();
    auto everyone_knows = [&] {
        return std::all_of(nodes_.begin(), nodes_.end(),
                           [&](const auto& kv) { return !kv.second->online || knows_tx(kv.first, *d); });
    };
    for (unsigned i = 0; i < retries && !everyone_knows(); ++i) {
        for (const auto& [id, n] : nodes_) {
            if (n->online && knows_tx(id, *d)) flood(id, tx, {});
        }
        run_until_quiet();
    }
    std::size_t count = 0;
    for (const auto& [id, n] : nodes_) count += id != origin && n->online && knows_tx(id, *d);
    return count;
}

void SimNetwork::gossip_tx(const NodeId& origin, const Transaction& tx, unsigned retries, std::uint64_t retry_interval)
{
    Node& o = node(origin);
    auto d = o.miner->submit(tx);
    if (!d) return;
    flood(origin, tx, {});
    struct Retry {
        SimNetwork* net;
        NodeId origin;
        Transaction tx;
        Digest digest;
        unsigned left;
        std::uint64_t interval;
        void operator()() const
        {
            if (left == 0 || !net->node(origin).miner->pool().contains(digest)) return;
            net->flood(origin, tx, {});
            Retry next = *this;
            --next.left;
            net->schedule(net->now() + interval, next);
        }
    };
    if (retries > 0) schedule(now_ + retry_interval, Retry{this, origin, tx, *d, retries, retry_interval});
}

MiningResult SimNetwork::mine(const NodeId& id)
{
    Node& n = node(id);
    auto r = n.miner->mine(now_ / 1000);
    const Message m = broadcast_block_msg(r.block);
    for (const auto& p : n.peers) send(id, p, m);
    appended(n, r.block);
    return r;
}

std::optional<UpdateTx> SimNetwork::fetch_update_tx(const NodeId& requester, const NodeId& peer, const Digest& digest,
                                                    std::uint64_t budget)
{
    Node& n = node(requester);
    n.update_answers.erase(digest);
    send(requester, peer, req_tx(digest, true));
    const auto deadline = now_ + budget;
    while (!n.update_answers.count(digest)) {
        if (queue_.empty() || queue_.begin()->first.first > deadline) {
            throw FetchTimeout("no ResUpdateTx from " + peer + " within " + std::to_string(budget) + " ticks");
        }
        step();
    }
    const auto& answer = n.update_answers[digest];
    if (!answer) return std::nullopt;
    if (!std::holds_alternative<UpdateTx>(*answer)) return std::nullopt;
    return std::get<UpdateTx>(*answer);
}

void SimNetwork::poll_tips(const NodeId& id)
{
    Node& n = node(id);
    if (!n.online || n.error) return;
    for (const auto& p : n.peers) send(id, p, req_chain_tip());
}

void SimNetwork::begin_sync(const NodeId& joiner, const NodeId& peer)
{
    Node& n = node(joiner);
    n.online = true;
    n.sync_peer = peer;
    n.tip_known = false;
    n.error.reset();
    send(joiner, peer, req_chain_tip());
    arm_timer(n);
}

bool SimNetwork::syncing(const NodeId& id) const
{
    const Node& n = node(id);
    if (!n.sync_peer || n.error) return false;
    if (!n.tip_known || n.pending || n.awaiting_block) return true;
    auto it = n.peer_tip.find(*n.sync_peer);
    return it != n.peer_tip.end() && it->second > n.miner->state().height();
}

std::optional<std::pair<std::uint64_t, std::string>> SimNetwork::sync_error(const NodeId& id) const
{
    return node(id).error;
}

void SimNetwork::sync_new_miner(const NodeId& joiner, const NodeId& peer)
{
    begin_sync(joiner, peer);
    while (syncing(joiner) && step()) {
    }
    Node& n = node(joiner);
    n.sync_peer.reset();
    if (n.error) throw SyncAborted(n.error->first, n.error->second);
    const auto target = node(peer).miner->state().height();
    if (n.miner->state().height() < target) throw SyncAborted(n.miner->state().height() + 1, "peer stopped answering");
}

Digest SimNetwork::trace_digest() const
{
    Hasher h;
    for (const auto& e : trace_) {
        const std::string line = format_trace(e) + '\n';
        h.update(ByteView(reinterpret_cast<const std::uint8_t*>(line.data()), line.size()));
    }
    return h.finish();
}

} // namespace redact::net
