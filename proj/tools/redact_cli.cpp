// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

// Command-line front end: keys, submission, updates, mining, explorer,
// maintenance and the network simulator. Every command prints JSON lines
// (the simulator prints its text report) and exits 0 ok, 2 usage,
// 3 not found, 4 rejected, 1 for anything else.

#include "redact/explorer.hpp"
#include "redact/scenario.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace redact;

namespace {

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kNotFound = 3, kRejected = 4 };

struct CliError : std::runtime_error {
    CliError(int c, const std::string& what) : std::runtime_error(what), code(c) {}
    int code;
};

struct Globals {
    std::string store;
    std::optional<std::uint64_t> seed;
    bool public_mode = false;
    unsigned difficulty = 8;
    std::string consensus = "pow";
};

Bytes read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError(kNotFound, "cannot read " + path.string());
    return Bytes(std::istreambuf_iterator<char>(in), {});
}

void write_file(const fs::path& path, ByteView bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CliError(kFailure, "cannot write " + path.string());
}

void emit(const Json& j)
{
    std::cout << j.dump() << '\n';
}

fs::path store_path(const Globals& g)
{
    if (!g.store.empty()) return g.store;
    const char* home = std::getenv("CHAIN_HOME");
    return fs::path(home && *home ? home : ".redact") / "chain.db";
}

std::unique_ptr<RandomSource> make_rng(const Globals& g)
{
    if (g.seed) return std::make_unique<SeededRandom>(*g.seed);
    return std::make_unique<SystemRandom>();
}

NodeConfig node_config(const Globals& g)
{
    NodeConfig c;
    c.public_mode = g.public_mode;
    c.difficulty = g.difficulty;
    c.consensus = parse_consensus(g.consensus);
    return c;
}

ClientKeys load_keys(const std::string& path)
{
    try {
        return decode_client_keys(read_file(path));
    } catch (const DecodeError& e) {
        throw CliError(kUsage, path + " is not a key file: " + e.what());
    }
}

Address parse_address(const std::string& hex)
{
    try {
        return Digest::from_hex(hex);
    } catch (const DecodeError&) {
        throw CliError(kUsage, "malformed address '" + hex + "'");
    }
}

fs::path with_parent(fs::path p)
{
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p;
}

// A node backed by the store file; the open pool lives next to it.
class LocalNode {
public:
    explicit LocalNode(const Globals& g)
        : path_(with_parent(store_path(g))), store_(path_), miner_(store_, node_config(g))
    {
        if (fs::exists(pool_path())) {
            const Bytes raw = read_file(pool_path());
            ByteReader r(raw);
            while (!r.done()) {
                Transaction tx = decode_tx(r.prefixed());
                if (auto d = pool_digest(tx, miner_.state(), miner_.pool())) miner_.pool().add(*d, std::move(tx));
            }
        }
    }

    ~LocalNode()
    {
        try {
            save_pool();
        } catch (...) {
        }
    }

    Miner& miner() { return miner_; }
    NodeState& state() { return miner_.state(); }
    Store& store() { return store_; }
    const fs::path& path() const { return path_; }

    Digest submit(const Transaction& tx)
    {
        std::optional<Digest> d;
        try {
            d = miner_.submit(tx);
        } catch (const TransactionError& e) {
            throw CliError(kRejected, e.what());
        }
        if (!d) throw CliError(kRejected, "transaction already pending or mined");
        save_pool();
        return *d;
    }

    void save_pool()
    {
        ByteWriter w;
        for (const auto& [d, tx] : miner_.pool().snapshot()) w.prefixed(encode_tx(tx));
        write_file(pool_path(), w.bytes());
    }

    // Next counter for `from`, counting its transactions still in the pool.
    std::uint32_t next_tx_cnt(const Address& from)
    {
        auto account = state().account(from);
        if (!account) throw CliError(kNotFound, "no account " + from.hex());
        std::uint32_t cnt = account->tx_cnt;
        for (const auto& [d, tx] : miner_.pool().snapshot()) {
            std::visit(
                [&](const auto& t) {
                    if constexpr (requires { t.tx_cnt; }) {
                        if (t.from == from) cnt = std::max(cnt, t.tx_cnt);
                    }
                },
                tx);
        }
        return cnt + 1;
    }

private:
    fs::path pool_path() const { return fs::path(path_.string() + ".pool"); }

    fs::path path_;
    Store store_;
    Miner miner_;
};

Transaction find_mined(LocalNode& node, const std::string& hex)
{
    Digest d;
    try {
        d = Digest::from_hex(hex);
    } catch (const DecodeError&) {
        throw CliError(kUsage, "malformed digest '" + hex + "'");
    }
    auto tx = node.state().find_tx(d);
    if (!tx) throw CliError(kNotFound, "no transaction " + hex);
    return *tx;
}

int run_simulate(const Globals& g, const std::string& file)
{
    const Bytes raw = read_file(file);
    net::ScenarioRun run;
    try {
        run = net::run_scenario(to_string(raw), g.seed);
    } catch (const net::ScenarioError& e) {
        throw CliError(kUsage, e.what());
    }
    std::cout << run.report.text();
    return run.report.converged ? kOk : kRejected;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Redactable blockchain node, client and simulator"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--store", g.store, "Store file (default $CHAIN_HOME/chain.db)");
    app.add_option("--seed", g.seed, "Deterministic randomness seed");
    app.add_flag("--public-mode", g.public_mode, "Require a nonzero fee on updates");
    app.add_option("--difficulty", g.difficulty, "Leading zero bits for proof of work")->check(CLI::Range(0u, kMaxDifficulty));
    app.add_option("--consensus", g.consensus, "pow or roundrobin")->check(CLI::IsMember({"pow", "roundrobin"}));

    std::function<int()> action;

    // account create
    auto* account = app.add_subcommand("account", "Client account management");
    account->require_subcommand(1);
    auto* create = account->add_subcommand("create", "Generate keys and a signed AccountTx");
    std::string out_dir = ".";
    std::string name = "client";
    unsigned bits = 128;
    std::uint64_t account_fee = 0;
    bool force = false;
    bool submit_account = false;
    create->add_option("--out", out_dir, "Output directory");
    create->add_option("--name", name, "File name stem");
    create->add_option("--bits", bits, "Group size in bits")->check(CLI::Range(chf::kMinSecurityBits, 4096u));
    create->add_option("--fee", account_fee, "AccountTx fee");
    create->add_flag("--force", force, "Overwrite existing files");
    create->add_flag("--submit", submit_account, "Also add the AccountTx to the local pool");
    create->callback([&] {
        action = [&] {
            const fs::path key_file = fs::path(out_dir) / (name + ".key");
            const fs::path tx_file = fs::path(out_dir) / (name + ".accounttx");
            if (!force && (fs::exists(key_file) || fs::exists(tx_file))) {
                throw CliError(kUsage, "refusing to overwrite " + key_file.string() + " (use --force)");
            }
            fs::create_directories(out_dir);
            auto rng = make_rng(g);
            const ClientKeys keys = generate_client_keys(bits, *rng);
            const Transaction tx = make_account_tx(keys, account_fee, {}, *rng);
            write_file(key_file, encode_client_keys(keys));
            write_file(tx_file, encode_tx(tx));
            Json j{{"address", keys.address().hex()}, {"key_file", key_file.string()}, {"account_tx_file", tx_file.string()}};
            if (submit_account) {
                LocalNode node(g);
                j["digest"] = node.submit(tx).hex();
            }
            emit(j);
            return kOk;
        };
    });

    // submit
    auto* submit = app.add_subcommand("submit", "Add a transaction file to the local pool");
    std::string tx_file;
    submit->add_option("file", tx_file, "Transaction wire bytes")->required();
    submit->callback([&] {
        action = [&] {
            Transaction tx;
            try {
                tx = decode_tx(read_file(tx_file));
            } catch (const DecodeError& e) {
                throw CliError(kUsage, tx_file + ": " + e.what());
            }
            LocalNode node(g);
            emit({{"digest", node.submit(tx).hex()}});
            return kOk;
        };
    });

    // send
    auto* send = app.add_subcommand("send", "Build, sign and submit a funds or data transaction");
    std::string kind;
    std::string from_keys;
    std::string to_hex_addr;
    std::uint64_t amount = 0;
    std::optional<std::string> data;
    std::uint64_t fee = 1;
    send->add_option("kind", kind, "funds or data")->required()->check(CLI::IsMember({"funds", "data"}));
    send->add_option("--from", from_keys, "Sender key file")->required();
    send->add_option("--to", to_hex_addr, "Receiver address (hex)")->required();
    send->add_option("--amount", amount, "Amount to transfer");
    send->add_option("--data", data, "Data field");
    send->add_option("--fee", fee, "Fee");
    send->callback([&] {
        action = [&] {
            if (kind == "data" && !data) throw CliError(kUsage, "send data needs --data");
            const ClientKeys keys = load_keys(from_keys);
            const Address to = parse_address(to_hex_addr);
            LocalNode node(g);
            auto rng = make_rng(g);
            const auto cnt = node.next_tx_cnt(keys.address());
            const Bytes payload = to_bytes(data.value_or(""));
            Transaction tx;
            if (kind == "funds") {
                tx = make_funds_tx(keys, to, amount, fee, cnt, payload, *rng);
            } else {
                tx = make_data_tx(keys, to, fee, cnt, payload, *rng);
            }
            emit({{"digest", node.submit(tx).hex()}, {"tx_cnt", cnt}});
            return kOk;
        };
    });

    // update
    auto* update = app.add_subcommand("update", "Request a Data-field modification of a mined transaction");
    std::string target;
    std::optional<std::string> new_data;
    bool erase = false;
    std::string reason;
    std::uint64_t update_fee = 1;
    std::string keys_file;
    update->add_option("target", target, "Digest of the transaction to modify")->required();
    auto* data_opt = update->add_option("--data", new_data, "Replacement data");
    update->add_flag("--erase", erase, "Replace the data with nothing")->excludes(data_opt);
    update->add_option("--reason", reason, "Reason shown by the explorer");
    update->add_option("--fee", update_fee, "Fee");
    update->add_option("--keys", keys_file, "Owner key file (with trapdoor)")->required();
    update->callback([&] {
        action = [&] {
            if (!erase && !new_data) throw CliError(kUsage, "update needs --data or --erase");
            if (g.public_mode && update_fee == 0) throw CliError(kRejected, "public mode requires a nonzero update fee");
            const ClientKeys keys = load_keys(keys_file);
            if (!keys.chf.has_trapdoor()) throw CliError(kUsage, keys_file + " holds no trapdoor key");
            LocalNode node(g);
            const Transaction original = find_mined(node, target);
            auto rng = make_rng(g);
            UpdateTx u;
            try {
                u = make_update(original, erase ? Bytes{} : to_bytes(*new_data), to_bytes(reason), update_fee, keys, *rng);
            } catch (const TransactionError& e) {
                throw CliError(kRejected, e.what());
            }
            emit({{"digest", node.submit(u).hex()}});
            return kOk;
        };
    });

    // mine
    auto* mine = app.add_subcommand("mine", "Run one mining round over the local pool");
    std::optional<std::uint64_t> timestamp;
    mine->add_option("--timestamp", timestamp, "Block timestamp (default: now)");
    mine->callback([&] {
        action = [&] {
            LocalNode node(g);
            const auto ts = timestamp.value_or(static_cast<std::uint64_t>(std::time(nullptr)));
            const auto r = node.miner().mine(ts);
            node.save_pool();
            emit(block_to_json(r.block));
            for (const auto& d : r.decisions) emit(decision_to_json(d));
            return kOk;
        };
    });

    // explore
    auto* explore = app.add_subcommand("explore", "Show a block, transaction or account");
    std::string selector;
    explore->add_option("selector", selector, "Block height, 'tip', transaction digest or address")->required();
    explore->callback([&] {
        action = [&] {
            LocalNode node(g);
            auto& state = node.state();
            if (selector == "tip") selector = std::to_string(state.height());
            if (!selector.empty() && selector.size() < 20 &&
                selector.find_first_not_of("0123456789") == std::string::npos) {
                const auto h = std::stoull(selector);
                if (h > state.height()) throw CliError(kNotFound, "no block at height " + selector);
                emit(block_to_json(state.block_at(h)));
                return kOk;
            }
            Digest d;
            try {
                d = Digest::from_hex(selector);
            } catch (const DecodeError&) {
                throw CliError(kUsage, "selector must be a height, 'tip' or 64 hex digits");
            }
            if (auto tx = state.find_tx(d)) {
                emit(tx_to_json(*tx, d));
            } else if (auto account = state.account(d)) {
                emit(account_to_json(*account));
            } else {
                throw CliError(kNotFound, "nothing stored under " + selector);
            }
            return kOk;
        };
    });

    // aggregate
    auto* aggregate = app.add_subcommand("aggregate", "Bundle mined transactions into an AggTx");
    std::string agg_kind;
    std::vector<std::string> agg_digests;
    aggregate->add_option("kind", agg_kind, "funds or data")->required()->check(CLI::IsMember({"funds", "data"}));
    aggregate->add_option("digests", agg_digests, "Mined transaction digests")->required()->expected(2, -1);
    aggregate->callback([&] {
        action = [&] {
            LocalNode node(g);
            AggTx agg;
            try {
                if (agg_kind == "funds") {
                    std::vector<FundsTx> txs;
                    for (const auto& h : agg_digests) {
                        auto tx = find_mined(node, h);
                        if (!std::holds_alternative<FundsTx>(tx)) throw CliError(kRejected, h + " is not a funds transaction");
                        txs.push_back(std::get<FundsTx>(tx));
                    }
                    agg = aggregate_funds(txs, node.state());
                } else {
                    std::vector<DataTx> txs;
                    for (const auto& h : agg_digests) {
                        auto tx = find_mined(node, h);
                        if (!std::holds_alternative<DataTx>(tx)) throw CliError(kRejected, h + " is not a data transaction");
                        txs.push_back(std::get<DataTx>(tx));
                    }
                    agg = aggregate_data(txs, node.state());
                }
            } catch (const AggregationError& e) {
                throw CliError(kRejected, e.what());
            }
            const Digest d = node.submit(agg);
            Json j = tx_to_json(agg, d);
            emit(j);
            return kOk;
        };
    });

    // compact
    auto* compact = app.add_subcommand("compact", "Rewrite the store file with live records only");
    compact->callback([&] {
        action = [&] {
            LocalNode node(g);
            const auto before = fs::exists(node.path()) ? fs::file_size(node.path()) : 0;
            node.store().close();
            emit({{"path", node.path().string()}, {"bytes_before", before}, {"bytes_after", fs::file_size(node.path())}});
            return kOk;
        };
    });

    // validate
    auto* validate = app.add_subcommand("validate", "Check the whole chain");
    validate->callback([&] {
        action = [&] {
            LocalNode node(g);
            const auto v = validate_chain(node.state().chain(), node.state());
            Json j{{"ok", v.ok()}, {"height", node.state().height()}, {"fallback_links", v.fallback_links}};
            if (v.violation) {
                j["violation"] = {{"height", v.violation->height},
                                  {"check", std::string(check_name(v.violation->check))},
                                  {"detail", v.violation->detail}};
            }
            emit(j);
            return v.ok() ? kOk : kRejected;
        };
    });

    // dump
    auto* dump = app.add_subcommand("dump", "Print every bucket as hex lines");
    bool digest_only = false;
    dump->add_flag("--digest", digest_only, "Print only the digest of the dump");
    dump->callback([&] {
        action = [&] {
            LocalNode node(g);
            if (digest_only) {
                std::cout << node.store().dump_digest().hex() << '\n';
            } else {
                std::cout << node.store().dump();
            }
            return kOk;
        };
    });

    // status
    auto* status = app.add_subcommand("status", "Chain height, tip and pool size");
    status->callback([&] {
        action = [&] {
            LocalNode node(g);
            emit({{"height", node.state().height()},
                  {"tip", node.state().tip_hash().hex()},
                  {"pool", node.miner().pool().size()},
                  {"store", node.path().string()}});
            return kOk;
        };
    });

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run a network scenario script");
    std::string scenario_file;
    simulate->add_option("scenario", scenario_file, "Scenario file")->required();
    simulate->callback([&] { action = [&] { return run_simulate(g, scenario_file); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        return action();
    } catch (const CliError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
}
