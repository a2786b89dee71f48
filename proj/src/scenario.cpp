// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#include "redact/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

namespace redact::net {

namespace {

struct Token {
    std::string text;
    bool quoted = false;
};

std::vector<Token> tokenize(std::string_view line, std::size_t no)
{
    std::vector<Token> out;
    Token cur;
    bool in_token = false;
    bool in_quote = false;
    for (char c : line) {
        if (in_quote) {
            if (c == '"') {
                in_quote = false;
            } else {
                cur.text.push_back(c);
            }
            continue;
        }
        if (c == '#') break;
        if (c == '"') {
            in_quote = true;
            if (!in_token) cur.quoted = true;  // key="value" stays an option
            in_token = true;
        } else if (c == ' ' || c == '\t' || c == '\r') {
            if (in_token) out.push_back(std::exchange(cur, {}));
            in_token = false;
        } else {
            cur.text.push_back(c);
            in_token = true;
        }
    }
    if (in_quote) throw ScenarioError(no, "unterminated quote");
    if (in_token) out.push_back(cur);
    return out;
}

std::uint64_t parse_u64(const std::string& s, std::size_t no, const char* what)
{
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw ScenarioError(no, std::string("bad ") + what + " '" + s + "'");
    }
    return v;
}

double parse_probability(const std::string& s, std::size_t no)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size() && v >= 0.0 && v <= 1.0) return v;
    } catch (const std::exception&) {
    }
    throw ScenarioError(no, "bad drop rate '" + s + "'");
}

bool parse_switch(const std::string& s, std::size_t no)
{
    if (s == "on" || s == "true" || s == "1") return true;
    if (s == "off" || s == "false" || s == "0") return false;
    throw ScenarioError(no, "expected on or off, got '" + s + "'");
}

// Positional arguments plus key=value options.
struct Command {
    std::size_t line = 0;
    std::uint64_t tick = 0;
    std::vector<std::string> args;
    std::map<std::string, std::string> opts;

    std::string opt(const std::string& key, std::string fallback) const
    {
        auto it = opts.find(key);
        return it == opts.end() ? fallback : it->second;
    }
};

struct Script {
    std::uint64_t seed = 1;
    NodeConfig config;
    std::uint64_t block_interval = 0;
    unsigned security_bits = 128;
    std::optional<std::uint64_t> until;
    unsigned retries = 3;
    std::vector<std::pair<NodeId, bool>> nodes;  // id, late
    std::vector<std::tuple<NodeId, NodeId, Link>> links;
    std::vector<Command> commands;
};

const std::map<std::string, std::pair<std::size_t, std::set<std::string>>>& command_shapes()
{
    // positional count (after the command word) and allowed options
    static const std::map<std::string, std::pair<std::size_t, std::set<std::string>>> shapes = {
        {"account", {2, {"fee"}}},
        {"send", {5, {"fee", "data", "as"}}},
        {"update", {3, {"reason", "fee", "as"}}},
        {"erase", {2, {"reason", "fee", "as"}}},
        {"mine", {1, {}}},
        {"join", {2, {}}},
        {"tamper", {2, {}}},
        {"offline", {1, {}}},
        {"online", {1, {}}},
    };
    return shapes;
}

Script parse(std::string_view text)
{
    Script s;
    std::set<NodeId> known;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t no = 0;
    while (std::getline(in, raw)) {
        ++no;
        const auto tok = tokenize(raw, no);
        if (tok.empty()) continue;
        const std::string& word = tok[0].text;
        auto need = [&](std::size_t n) {
            if (tok.size() != n) throw ScenarioError(no, "'" + word + "' takes " + std::to_string(n - 1) + " argument(s)");
        };
        if (word == "seed") {
            need(2);
            s.seed = parse_u64(tok[1].text, no, "seed");
        } else if (word == "consensus") {
            need(2);
            try {
                s.config.consensus = parse_consensus(tok[1].text);
            } catch (const std::invalid_argument& e) {
                throw ScenarioError(no, e.what());
            }
        } else if (word == "difficulty") {
            need(2);
            s.config.difficulty = static_cast<unsigned>(parse_u64(tok[1].text, no, "difficulty"));
            if (s.config.difficulty > kMaxDifficulty) throw ScenarioError(no, "difficulty above 24");
        } else if (word == "block_interval") {
            need(2);
            s.block_interval = parse_u64(tok[1].text, no, "interval");
        } else if (word == "security_bits") {
            need(2);
            s.security_bits = static_cast<unsigned>(parse_u64(tok[1].text, no, "security bits"));
            if (s.security_bits < chf::kMinSecurityBits) throw ScenarioError(no, "security_bits below 16");
        } else if (word == "public_mode") {
            need(2);
            s.config.public_mode = parse_switch(tok[1].text, no);
        } else if (word == "initial_balance") {
            need(2);
            s.config.initial_balance = parse_u64(tok[1].text, no, "balance");
        } else if (word == "until") {
            need(2);
            s.until = parse_u64(tok[1].text, no, "tick");
        } else if (word == "retries") {
            need(2);
            s.retries = static_cast<unsigned>(parse_u64(tok[1].text, no, "retry count"));
        } else if (word == "node") {
            if (tok.size() != 2 && !(tok.size() == 3 && tok[2].text == "late")) {
                throw ScenarioError(no, "usage: node <id> [late]");
            }
            if (!known.insert(tok[1].text).second) throw ScenarioError(no, "duplicate node '" + tok[1].text + "'");
            s.nodes.emplace_back(tok[1].text, tok.size() == 3);
        } else if (word == "link") {
            if (tok.size() < 3) throw ScenarioError(no, "usage: link <a> <b> delay=<ticks> drop=<p>");
            Link link;
            for (std::size_t i = 3; i < tok.size(); ++i) {
                const auto eq = tok[i].text.find('=');
                const std::string key = tok[i].text.substr(0, eq);
                const std::string val = eq == std::string::npos ? "" : tok[i].text.substr(eq + 1);
                if (key == "delay") {
                    link.delay = parse_u64(val, no, "delay");
                } else if (key == "drop") {
                    link.drop = parse_probability(val, no);
                } else {
                    throw ScenarioError(no, "unknown link option '" + tok[i].text + "'");
                }
            }
            for (int i : {1, 2}) {
                if (!known.count(tok[i].text)) throw ScenarioError(no, "unknown node '" + tok[i].text + "'");
            }
            if (tok[1].text == tok[2].text) throw ScenarioError(no, "self link");
            s.links.emplace_back(tok[1].text, tok[2].text, link);
        } else if (word == "at") {
            if (tok.size() < 3) throw ScenarioError(no, "usage: at <tick> <command>");
            Command c;
            c.line = no;
            c.tick = parse_u64(tok[1].text, no, "tick");
            const auto shape = command_shapes().find(tok[2].text);
            if (shape == command_shapes().end()) throw ScenarioError(no, "unknown command '" + tok[2].text + "'");
            c.args.push_back(tok[2].text);
            for (std::size_t i = 3; i < tok.size(); ++i) {
                const auto eq = tok[i].text.find('=');
                if (!tok[i].quoted && eq != std::string::npos) {
                    const std::string key = tok[i].text.substr(0, eq);
                    if (!shape->second.second.count(key)) throw ScenarioError(no, "unknown option '" + key + "'");
                    c.opts[key] = tok[i].text.substr(eq + 1);
                } else {
                    c.args.push_back(tok[i].text);
                }
            }
            if (c.args.size() - 1 != shape->second.first) {
                throw ScenarioError(no, "'" + c.args[0] + "' takes " + std::to_string(shape->second.first) +
                                            " argument(s)");
            }
            if (c.args[0] == "send" && c.args[1] != "funds" && c.args[1] != "data") {
                throw ScenarioError(no, "send kind must be funds or data");
            }
            s.commands.push_back(std::move(c));
        } else {
            throw ScenarioError(no, "unknown directive '" + word + "'");
        }
    }
    if (s.nodes.empty()) throw ScenarioError(no, "no nodes declared");
    return s;
}

struct Tracked {
    UpdateReport report;
    std::uint64_t t0 = 0;
    std::uint64_t h0 = 0;
    std::set<NodeId> participants;
    std::set<NodeId> applied;
};

class Runner {
public:
    Runner(const Script& script, SimNetwork& net) : s_(script), net_(net) {}

    void execute(const Command& c)
    {
        try {
            dispatch(c);
        } catch (const ScenarioError&) {
            throw;
        } catch (const std::exception& e) {
            throw ScenarioError(c.line, e.what());
        }
    }

    void block_applied(const NodeId& id, const Block& b)
    {
        for (auto& t : tracked_) {
            if (t.report.latency_blocks || !t.participants.count(id)) continue;
            const auto& list = b.update_tx_list;
            if (std::find(list.begin(), list.end(), t.report.digest) == list.end()) continue;
            t.applied.insert(id);
            if (t.applied == t.participants) {
                t.report.latency_blocks = b.height - t.h0;
                t.report.latency_ticks = net_.now() - t.t0;
            }
        }
    }

    void auto_mine(std::uint64_t slot)
    {
        std::vector<NodeId> eligible;
        for (const auto& id : net_.node_ids()) {
            if (net_.online(id) && !late_.count(id) && !net_.syncing(id) && !net_.sync_error(id)) {
                eligible.push_back(id);
            }
        }
        if (eligible.empty()) return;
        const std::size_t pick = s_.config.consensus == Consensus::RoundRobin
                                     ? static_cast<std::size_t>(slot % eligible.size())
                                     : static_cast<std::size_t>(net_.rng().uniform(eligible.size()));
        net_.mine(eligible[pick]);
    }

    void mark_late(const NodeId& id) { late_.insert(id); }
    std::vector<UpdateReport> updates() const
    {
        std::vector<UpdateReport> out;
        for (const auto& t : tracked_) out.push_back(t.report);
        return out;
    }
    std::map<std::string, Digest> labels() const
    {
        std::map<std::string, Digest> out;
        for (const auto& [k, v] : labels_) out.emplace(k, v.digest);
        return out;
    }

private:
    struct Labeled {
        Digest digest;
        std::string owner;
        Transaction tx;
    };

    const NodeId& node_arg(const Command& c, std::size_t i) const
    {
        if (!net_.has_node(c.args[i])) throw ScenarioError(c.line, "unknown node '" + c.args[i] + "'");
        return c.args[i];
    }

    const ClientKeys& client(const Command& c, const std::string& name) const
    {
        auto it = clients_.find(name);
        if (it == clients_.end()) throw ScenarioError(c.line, "unknown client '" + name + "'");
        return it->second;
    }

    std::uint64_t fee(const Command& c, std::uint64_t fallback) const
    {
        return parse_u64(c.opt("fee", std::to_string(fallback)), c.line, "fee");
    }

    std::string label_for(const Command& c)
    {
        std::string label = c.opt("as", "tx" + std::to_string(++auto_label_));
        if (labels_.count(label)) throw ScenarioError(c.line, "label '" + label + "' already used");
        return label;
    }

    void submit(const Command& c, const NodeId& node, const std::string& owner, const Transaction& tx)
    {
        const std::string label = label_for(c);
        const auto d = tx_hash(tx, clients_.at(owner).chf);
        labels_[label] = {d, owner, tx};
        if (std::holds_alternative<UpdateTx>(tx)) {
            Tracked t;
            t.report.label = label;
            t.report.digest = d;
            t.t0 = net_.now();
            t.h0 = net_.miner(node).state().height();
            for (const auto& id : net_.node_ids()) {
                if (net_.online(id) && !late_.count(id)) t.participants.insert(id);
            }
            tracked_.push_back(std::move(t));
        }
        try {
            net_.gossip_tx(node, tx, s_.retries);
        } catch (const TransactionError&) {
            // the node does not know the sender yet and refuses; the client gives up
        }
    }

    void dispatch(const Command& c)
    {
        const std::string& cmd = c.args[0];
        if (cmd == "account") {
            const std::string& name = c.args[1];
            const NodeId& node = node_arg(c, 2);
            if (!clients_.count(name)) clients_.emplace(name, generate_client_keys(s_.security_bits, net_.rng()));
            submit(c, node, name, make_account_tx(clients_.at(name), fee(c, 0), {}, net_.rng()));
        } else if (cmd == "send") {
            const auto& from = client(c, c.args[2]);
            const auto& to = client(c, c.args[3]);
            const NodeId& node = node_arg(c, 5);
            const auto cnt = ++counters_[c.args[2]];
            Transaction tx;
            if (c.args[1] == "funds") {
                const auto amount = parse_u64(c.args[4], c.line, "amount");
                tx = make_funds_tx(from, to.address(), amount, fee(c, 1), cnt, to_bytes(c.opt("data", "")), net_.rng());
            } else {
                tx = make_data_tx(from, to.address(), fee(c, 1), cnt, to_bytes(c.args[4]), net_.rng());
            }
            submit(c, node, c.args[2], tx);
        } else if (cmd == "update" || cmd == "erase") {
            const bool erase = cmd == "erase";
            auto it = labels_.find(c.args[1]);
            if (it == labels_.end()) throw ScenarioError(c.line, "unknown label '" + c.args[1] + "'");
            const NodeId& node = node_arg(c, erase ? 2 : 3);
            const Labeled target = it->second;
            // the client works from the node's current copy when it has one
            Transaction current = net_.miner(node).state().find_tx(target.digest).value_or(target.tx);
            Bytes data = erase ? Bytes{} : to_bytes(c.args[2]);
            UpdateTx u = make_update(current, std::move(data), to_bytes(c.opt("reason", erase ? "erase" : "update")),
                                     fee(c, 1), client(c, target.owner), net_.rng());
            submit(c, node, target.owner, u);
        } else if (cmd == "mine") {
            net_.mine(node_arg(c, 1));
        } else if (cmd == "join") {
            const NodeId& node = node_arg(c, 1);
            late_.erase(node);
            net_.begin_sync(node, node_arg(c, 2));
        } else if (cmd == "tamper") {
            const NodeId& node = node_arg(c, 1);
            auto it = labels_.find(c.args[2]);
            if (it == labels_.end()) throw ScenarioError(c.line, "unknown label '" + c.args[2] + "'");
            auto& state = net_.miner(node).state();
            auto tx = state.find_tx(it->second.digest);
            if (!tx) throw ScenarioError(c.line, "node '" + node + "' does not store '" + c.args[2] + "'");
            std::visit(
                [](auto& t) {
                    if constexpr (requires { t.fee; }) t.fee += 1;
                },
                *tx);
            state.put_tx(it->second.digest, *tx);
        } else if (cmd == "offline") {
            net_.set_online(node_arg(c, 1), false);
        } else if (cmd == "online") {
            net_.set_online(node_arg(c, 1), true);
        }
    }

    const Script& s_;
    SimNetwork& net_;
    std::map<std::string, ClientKeys> clients_;
    std::map<std::string, std::uint32_t> counters_;
    std::map<std::string, Labeled> labels_;
    std::size_t auto_label_ = 0;
    std::set<NodeId> late_;
    std::vector<Tracked> tracked_;
};

std::string optional_number(const std::optional<std::uint64_t>& v)
{
    return v ? std::to_string(*v) : "never";
}

} // namespace

ScenarioError::ScenarioError(std::size_t line, const std::string& what)
    : std::runtime_error("scenario line " + std::to_string(line) + ": " + what), line_(line)
{
}

std::string ScenarioReport::text() const
{
    std::string out = "seed " + std::to_string(seed) + '\n';
    for (const auto& n : nodes) {
        out += "node " + n.id + (n.online ? "" : " offline") + " height " + std::to_string(n.height) + " tip " +
               n.tip.hex() + " dump " + n.dump.hex();
        if (n.error) out += " rejected " + std::to_string(n.error->first);
        out += '\n';
    }
    for (const auto& u : updates) {
        out += "update " + u.label + ' ' + u.digest.hex() + " latency_blocks " + optional_number(u.latency_blocks) +
               " latency_ticks " + optional_number(u.latency_ticks) + '\n';
    }
    out += "messages " + std::to_string(messages) + " trace " + trace.hex() + '\n';
    out += std::string("converged ") + (converged ? "yes" : "no") + '\n';
    return out;
}

ScenarioRun run_scenario(std::string_view script, std::optional<std::uint64_t> seed)
{
    const Script s = parse(script);
    ScenarioRun run;
    run.report.seed = seed.value_or(s.seed);
    run.network = std::make_unique<SimNetwork>(run.report.seed, s.config);
    SimNetwork& net = *run.network;
    Runner runner(s, net);

    for (const auto& [id, late] : s.nodes) {
        net.add_node(id, !late);
        if (late) runner.mark_late(id);
    }
    for (const auto& [a, b, link] : s.links) net.connect(a, b, link);
    net.on_block([&](const NodeId& id, const Block& b) { runner.block_applied(id, b); });

    std::uint64_t last = 0;
    for (const auto& c : s.commands) {
        last = std::max(last, c.tick);
        net.schedule(c.tick, [&runner, &c] { runner.execute(c); });
    }
    const std::uint64_t until = s.until.value_or(last + 5 * s.block_interval);
    if (s.block_interval > 0) {
        for (std::uint64_t slot = 1; slot * s.block_interval <= until; ++slot) {
            net.schedule(slot * s.block_interval, [&runner, slot] { runner.auto_mine(slot); });
        }
    }
    net.run_until(until);
    net.run_until_quiet();

    // a dropped final announcement is never followed by a later block, so
    // nodes still behind poll their peers
    auto tips_agree = [&net] {
        std::set<Digest> tips;
        for (const auto& id : net.node_ids()) {
            if (net.online(id) && !net.sync_error(id)) tips.insert(net.miner(id).state().tip_hash());
        }
        return tips.size() <= 1;
    };
    for (int round = 0; round < 20 && !tips_agree(); ++round) {
        for (const auto& id : net.node_ids()) net.poll_tips(id);
        net.run_until_quiet();
    }

    auto& r = run.report;
    std::optional<std::pair<Digest, Digest>> reference;
    r.converged = true;
    for (const auto& id : net.node_ids()) {
        NodeReport n;
        n.id = id;
        n.online = net.online(id);
        const auto& state = net.miner(id).state();
        n.height = state.height();
        n.tip = state.tip_hash();
        n.dump = net.store(id).dump_digest();
        n.error = net.sync_error(id);
        if (n.online) {
            if (!reference) reference = {n.tip, n.dump};
            if (reference->first != n.tip || reference->second != n.dump) r.converged = false;
        }
        r.nodes.push_back(std::move(n));
    }
    r.updates = runner.updates();
    r.messages = net.trace().size();
    r.trace = net.trace_digest();
    run.labels = runner.labels();
    net.on_block({});
    return run;
}

} // namespace redact::net
