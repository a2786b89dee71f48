// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#ifndef REDACT_NETWORK_HPP
#define REDACT_NETWORK_HPP

#include "redact/miner.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace redact::net {

enum class Code : std::uint8_t {
    ReqBlock = 0x10,
    ResBlock = 0x11,
    ReqTx = 0x12,
    ResTx = 0x13,
    ReqUpdateTx = 0x14,
    ResUpdateTx = 0x15,
    BroadcastTx = 0x16,
    BroadcastBlock = 0x17,
    ReqChainTip = 0x18,
    ResChainTip = 0x19,
};

std::string_view code_name(Code code);

struct Message {
    Code code = Code::ReqChainTip;
    Bytes payload;

    bool operator==(const Message&) const = default;
};

/// 1-byte code, 4-byte big-endian payload length, payload.
Bytes encode_frame(const Message& m);
/// Throws DecodeError on an unknown code or a length mismatch.
Message decode_frame(ByteView frame);

// Payload layouts.
//   ReqBlock:        u64 height
//   ResBlock:        u64 height, u8 present, [block]
//   ReqTx/ReqUpdate: digest
//   ResTx/ResUpdate: digest, u8 present, [tx wire bytes]
//   BroadcastTx:     tx wire bytes
//   BroadcastBlock:  block wire bytes
//   ReqChainTip:     empty
//   ResChainTip:     u64 height, digest tip hash
Message req_block(std::uint64_t height);
Message res_block(std::uint64_t height, const std::optional<Block>& block);
Message req_tx(const Digest& digest, bool update_bucket);
Message res_tx(const Digest& digest, const std::optional<Transaction>& tx, bool update_bucket);
Message broadcast_tx_msg(const Transaction& tx);
Message broadcast_block_msg(const Block& block);
Message req_chain_tip();
Message res_chain_tip(std::uint64_t height, const Digest& tip);

using NodeId = std::string;

struct Link {
    std::uint64_t delay = 10;  // ticks
    double drop = 0.0;
};

struct TraceEntry {
    std::uint64_t tick = 0;  // send time
    NodeId from;
    NodeId to;
    Code code = Code::ReqChainTip;
    Digest frame_digest;
    bool dropped = false;
};

std::string format_trace(const TraceEntry& e);

class FetchTimeout : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SyncAborted : public std::runtime_error {
public:
    SyncAborted(std::uint64_t height, const std::string& reason);
    std::uint64_t height() const { return height_; }

private:
    std::uint64_t height_;
};

/// Deterministic discrete-event network of in-process nodes. One tick is one
/// simulated millisecond. Events are ordered by (tick, insertion order), so
/// every link is FIFO and a given seed always yields the same trace.
class SimNetwork {
public:
    SimNetwork(std::uint64_t seed, NodeConfig config);
    ~SimNetwork();
    SimNetwork(const SimNetwork&) = delete;
    SimNetwork& operator=(const SimNetwork&) = delete;

    void add_node(const NodeId& id, bool online = true);
    /// Bidirectional link.
    void connect(const NodeId& a, const NodeId& b, Link link);
    std::vector<NodeId> node_ids() const;
    bool has_node(const NodeId& id) const;

    Miner& miner(const NodeId& id);
    Store& store(const NodeId& id);
    bool online(const NodeId& id) const;
    /// Offline nodes drop every message delivered to them.
    void set_online(const NodeId& id, bool online);

    const NodeConfig& config() const { return config_; }
    RandomSource& rng() { return rng_; }
    std::uint64_t now() const { return now_; }

    void send(const NodeId& from, const NodeId& to, const Message& m);
    /// Runs `action` at `tick` (or now, if earlier).
    void schedule(std::uint64_t tick, std::function<void()> action);

    /// Processes one event. False when nothing is queued.
    bool step();
    /// Processes events until the queue is empty or `max_ticks` elapse.
    void run_until_quiet(std::uint64_t max_ticks = 10'000'000);
    /// Processes every event up to `tick` and advances the clock to it.
    void run_until(std::uint64_t tick);
    bool quiet() const;

    /// Submits at `origin` and floods. After quiescence, every node holding
    /// the transaction re-floods it, up to `retries` times, until all online
    /// nodes know it. Returns the number of other online nodes that know it.
    std::size_t broadcast_tx(const NodeId& origin, const Transaction& tx, unsigned retries = 0);
    /// Starts a flood without waiting; the origin re-floods `retries` times
    /// every `retry_interval` ticks while the transaction is still pending.
    void gossip_tx(const NodeId& origin, const Transaction& tx, unsigned retries = 0,
                   std::uint64_t retry_interval = 500);
    /// True when the node has the digest pending or stored.
    bool knows_tx(const NodeId& id, const Digest& digest) const;

    /// Runs a mining round at `id` (timestamp = simulated seconds) and
    /// broadcasts the block to its neighbours.
    MiningResult mine(const NodeId& id);

    /// Requests an UpdateTx body from `peer`. Empty when the peer answers
    /// that it has none; throws FetchTimeout when no answer arrives within
    /// `budget` ticks.
    std::optional<UpdateTx> fetch_update_tx(const NodeId& requester, const NodeId& peer, const Digest& digest,
                                            std::uint64_t budget = 1000);

    /// Starts catch-up of `joiner` from `peer` without waiting.
    void begin_sync(const NodeId& joiner, const NodeId& peer);
    /// Brings `joiner` online and replays the peer's chain block by block,
    /// fetching bodies as it goes. Throws SyncAborted with the height of the
    /// first block that fails validation.
    void sync_new_miner(const NodeId& joiner, const NodeId& peer);
    bool syncing(const NodeId& id) const;
    /// Asks every peer of `id` for its chain tip; a higher answer starts a
    /// block fetch. Recovers blocks whose announcement was dropped.
    void poll_tips(const NodeId& id);
    /// Height and reason of the last rejected block at `id`, if any.
    std::optional<std::pair<std::uint64_t, std::string>> sync_error(const NodeId& id) const;

    const std::vector<TraceEntry>& trace() const { return trace_; }
    Digest trace_digest() const;

    /// Called after a node appends a block, mined or received.
    void on_block(std::function<void(const NodeId&, const Block&)> hook) { block_hook_ = std::move(hook); }

private:
    struct Node;
    struct Event;

    Node& node(const NodeId& id);
    const Node& node(const NodeId& id) const;
    void push(Event e);
    void deliver(Node& n, const NodeId& from, const Message& m);
    void receive_tx(Node& n, const NodeId& from, const Transaction& tx);
    void receive_block(Node& n, const NodeId& from, const Block& b, bool relay);
    void receive_body(Node& n, const Digest& d, const std::optional<Transaction>& tx);
    void request_missing(Node& n);
    void finish_block(Node& n);
    void request_next(Node& n);
    void adopt_chain_of(Node& n, const NodeId& peer);
    void resubmit_orphans(Node& n);
    void arm_timer(Node& n);
    void flood(const NodeId& origin, const Transaction& tx, const NodeId& except);
    void appended(Node& n, const Block& b);

    NodeConfig config_;
    SeededRandom rng_;
    std::uint64_t now_ = 0;
    std::uint64_t seq_ = 0;
    std::map<NodeId, std::unique_ptr<Node>> nodes_;
    std::map<std::pair<NodeId, NodeId>, Link> links_;
    std::map<std::pair<NodeId, NodeId>, std::uint64_t> link_clock_;
    std::map<std::pair<std::uint64_t, std::uint64_t>, Event> queue_;
    std::vector<TraceEntry> trace_;
    std::function<void(const NodeId&, const Block&)> block_hook_;
};

} // namespace redact::net

#endif // REDACT_NETWORK_HPP
