// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

// Acceptance gate: runs AC1..AC10 and prints one PASS/FAIL line per
// criterion. Exit status is nonzero when any criterion fails.

#include "redact/scenario.hpp"
#include "support/memory_source.hpp"
#include "support/tiny_oracle.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace redact;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt_seconds(double s)
{
    std::ostringstream o;
    o.precision(2);
    o << std::fixed << s << "s";
    return o.str();
}

NodeConfig quick(unsigned difficulty = 4)
{
    NodeConfig c;
    c.difficulty = difficulty;
    return c;
}

// One node with funded accounts for the given clients.
struct Solo {
    Store store;
    Miner miner;
    SeededRandom rng;
    std::uint64_t clock = 0;

    Solo(std::initializer_list<const ClientKeys*> clients, std::uint64_t seed) : miner(store, quick()), rng(seed)
    {
        for (const auto* k : clients) miner.submit(make_account_tx(*k, 0, {}, rng));
        mine();
    }

    MiningResult mine() { return miner.mine(++clock); }

    Digest submit(const Transaction& tx)
    {
        auto d = miner.submit(tx);
        if (!d) throw std::runtime_error("submission refused");
        return *d;
    }

    std::uint32_t next_cnt(const ClientKeys& k) { return miner.state().account(k.address())->tx_cnt + 1; }
};

struct Clients {
    ClientKeys alice, bob, carol;
};

const Clients& clients()
{
    static const Clients c = [] {
        SeededRandom rng(909);
        return Clients{generate_client_keys(128, rng), generate_client_keys(128, rng), generate_client_keys(128, rng)};
    }();
    return c;
}

// AC1 ------------------------------------------------------------------------
Outcome collision_correctness()
{
    const auto start = std::chrono::steady_clock::now();
    SeededRandom rng(1001);
    constexpr int groups = 250;
    constexpr int keys_per_group = 4;
    int trials = 0;
    int equal = 0;
    for (int gi = 0; gi < groups; ++gi) {
        const auto group = chf::generate_parameters(512, rng);
        for (int k = 0; k < keys_per_group; ++k) {
            const auto params = k == 0 ? group : chf::generate_keys(group, rng);
            Bytes m(rng.uniform(64) + 1), m2(rng.uniform(64));
            rng.fill(m);
            rng.fill(m2);
            const auto check = chf::random_check_string(params, rng);
            const Digest d = chf::chameleon_hash(params, check, m);
            const auto check2 = chf::find_collision(params, m, check, m2, rng);
            ++trials;
            equal += chf::chameleon_hash(params, check2, m2) == d && chf::verify(params, m2, d, check2);
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {trials >= 1000 && equal == trials && secs < 60.0,
            std::to_string(equal) + "/" + std::to_string(trials) + " collisions hold at 512 bits in " + fmt_seconds(secs)};
}

// AC2 ------------------------------------------------------------------------
Outcome tiny_group_oracle()
{
    const auto params = chf::parameters_from_trapdoor(23, 11, 4, 7);
    const auto grp = oracle::make_group(23, 11, 4, 7);
    int mismatches = 0;
    int compared = 0;
    for (const std::string msg : {"", "m", "{name: Alise}"}) {
        for (unsigned r = 0; r < 11; ++r) {
            for (unsigned s = 0; s < 11; ++s) {
                const Digest lib = chf::chameleon_hash(params, {r, s}, to_bytes(msg));
                mismatches += lib != oracle::digest(grp, msg, r, s);
                ++compared;
            }
        }
    }
    return {mismatches == 0 && compared == 3 * 121,
            std::to_string(compared) + " check strings over 3 messages, " + std::to_string(mismatches) + " mismatches"};
}

// AC3 ------------------------------------------------------------------------
Outcome update_non_invasive()
{
    const auto& c = clients();
    net::SimNetwork sim(33, quick());
    const std::vector<std::string> ids = {"a", "b", "c"};
    for (const auto& id : ids) sim.add_node(id);
    sim.connect("a", "b", {15, 0});
    sim.connect("b", "c", {20, 0});
    sim.connect("a", "c", {25, 0});
    SeededRandom rng(34);
    auto mine_at = [&](std::size_t i) {
        sim.mine(ids[i % ids.size()]);
        sim.run_until_quiet();
    };

    for (const auto* k : {&c.alice, &c.bob}) sim.broadcast_tx("a", make_account_tx(*k, 0, {}, rng));
    mine_at(0);
    const Transaction target = make_data_tx(c.alice, c.bob.address(), 1, 1, to_bytes("{name: Alise}"), rng);
    sim.broadcast_tx("b", target);
    for (std::size_t i = 1; i < 5; ++i) mine_at(i);

    std::map<std::string, std::vector<Digest>> before;
    for (const auto& id : ids) {
        for (const auto& b : sim.miner(id).state().chain()) before[id].push_back(block_hash(b));
    }
    sim.broadcast_tx("c", make_update(target, to_bytes("{name: Alice}"), to_bytes("typo fix"), 1, c.alice, rng));
    mine_at(5);
    mine_at(6);

    bool ok = true;
    std::string why;
    const auto reference_dump = sim.store("a").dump_digest();
    for (const auto& id : ids) {
        const auto& state = sim.miner(id).state();
        if (state.height() != 7) ok = false, why += " " + id + ":height";
        const auto chain = state.chain();
        for (std::size_t h = 0; h < before[id].size(); ++h) {
            if (block_hash(chain[h]) != before[id][h]) ok = false, why += " " + id + ":hash@" + std::to_string(h);
        }
        if (!validate_chain(chain, state).ok()) ok = false, why += " " + id + ":invalid";
        if (sim.store(id).dump_digest() != reference_dump) ok = false, why += " " + id + ":dump";
    }
    const auto updated = sim.miner("a").state().find_tx(*tx_hash(target, sim.miner("a").state()));
    if (!updated || to_string(data_of(*updated)) != "{name: Alice}") ok = false, why += " update-not-applied";
    return {ok, ok ? "6 pre-update block hashes unchanged on 3 nodes; chains valid; dumps equal" : "failed:" + why};
}

// AC4 ------------------------------------------------------------------------
Outcome authorization_matrix()
{
    const auto& c = clients();
    const ClientKeys* keys[] = {&c.alice, &c.bob, &c.carol};
    Solo node({keys[0], keys[1], keys[2]}, 44);
    std::vector<Transaction> targets;
    for (int i = 0; i < 3; ++i) {
        Transaction t = make_data_tx(*keys[i], keys[(i + 1) % 3]->address(), 1, 1, to_bytes("owned"), node.rng);
        node.submit(t);
        targets.push_back(t);
    }
    node.mine();

    int owner_ok = 0;
    int cross_rejected = 0;
    int false_accepts = 0;
    for (int issuer = 0; issuer < 3; ++issuer) {
        for (int owner = 0; owner < 3; ++owner) {
            const Transaction& t = targets[owner];
            UpdateTx u;
            if (issuer == owner) {
                u = make_update(t, to_bytes("new"), to_bytes("r"), 1, *keys[issuer], node.rng);
            } else {
                // the strongest forgery a foreign client can build: a collision
                // under its own trapdoor, signed with its own key
                u.tx_to_update_hash = *tx_hash(t, node.miner.state());
                u.tx_to_update_data = to_bytes("new");
                auto cs = check_string_of(t);
                const auto& q = keys[issuer]->chf.q;
                cs.r %= q;
                cs.s %= q;
                const Digest nm = tx_message(with_data(t, u.tx_to_update_data, cs));
                u.tx_to_update_check_string =
                    chf::find_collision(keys[issuer]->chf, tx_message(t).view(), cs, nm.view(), node.rng);
                u.issuer = keys[issuer]->address();
                u.fee = 1;
                u.check_string = chf::random_check_string(keys[issuer]->chf, node.rng);
                u = std::get<UpdateTx>(sign_tx(u, keys[issuer]->signing.secret_key, keys[issuer]->chf));
            }
            const auto v = validate_update_tx(u, node.miner.state(), node.miner.config());
            if (issuer == owner) {
                owner_ok += v == UpdateVerdict::Ok;
            } else if (v == UpdateVerdict::NotOwner || v == UpdateVerdict::HashMismatch) {
                ++cross_rejected;
            } else if (v == UpdateVerdict::Ok) {
                ++false_accepts;
            }
        }
    }
    return {owner_ok == 3 && cross_rejected == 6 && false_accepts == 0,
            std::to_string(owner_ok) + "/3 owner updates ok, " + std::to_string(cross_rejected) +
                "/6 cross updates rejected at step 4 or 5, " + std::to_string(false_accepts) + " false accepts"};
}

// AC5 ------------------------------------------------------------------------
Outcome timeliness()
{
    std::uint64_t worst_blocks = 0;
    std::uint64_t worst_ticks = 0;
    bool ok = true;
    for (const std::uint64_t at : {4010, 4500, 4995}) {
        std::ostringstream script;
        script << "seed " << at << "\nconsensus roundrobin\ndifficulty 4\nsecurity_bits 128\nblock_interval 1000\n"
               << "node n1\nnode n2\nnode n3\n"
               << "link n1 n2 delay=20\nlink n2 n3 delay=30\nlink n1 n3 delay=25\n"
               << "at 10 account alice n1\nat 10 account bob n2\n"
               << "at 2500 send data alice bob \"{name: Alise}\" n1 as=rec\n"
               << "at " << at << " update rec \"{name: Alice}\" n2 reason=\"typo fix\" as=fix\n"
               << "until 9000\n";
        auto run = net::run_scenario(script.str());
        const auto& u = run.report.updates.at(0);
        if (!u.latency_blocks || !run.report.converged) {
            ok = false;
            continue;
        }
        worst_blocks = std::max(worst_blocks, *u.latency_blocks);
        worst_ticks = std::max(worst_ticks, *u.latency_ticks);
        for (const auto& id : run.network->node_ids()) {
            auto body = run.network->miner(id).state().find_tx(run.labels.at("rec"));
            if (!body || to_string(data_of(*body)) != "{name: Alice}") ok = false;
        }
    }
    ok = ok && worst_blocks <= 2 && worst_ticks <= 2000;
    return {ok, "worst case " + std::to_string(worst_blocks) + " blocks, " + std::to_string(worst_ticks) +
                    " ms simulated at 1 s round-robin blocks (3 submission offsets)"};
}

// AC6 ------------------------------------------------------------------------
Outcome aggregation()
{
    const auto& c = clients();
    Solo node({&c.alice, &c.bob, &c.carol}, 66);
    const Digest d1 = node.submit(make_funds_tx(c.alice, c.bob.address(), 5, 1, 1, to_bytes("memo"), node.rng));
    const Digest d2 = node.submit(make_funds_tx(c.alice, c.carol.address(), 7, 1, 2, to_bytes("memo"), node.rng));
    node.mine();
    node.mine();
    std::vector<FundsTx> txs;
    for (const auto& d : {d1, d2}) txs.push_back(std::get<FundsTx>(*node.miner.state().find_tx(d)));
    const AggTx agg = aggregate_funds(txs, node.miner.state());
    const Digest ad = node.submit(agg);
    node.mine();

    auto& state = node.miner.state();
    const auto v1 = validate_chain(state.chain(), state);
    const Transaction original = *state.find_tx(d1);
    node.submit(make_update(original, to_bytes("memo, corrected"), to_bytes("typo"), 1, c.alice, node.rng));
    node.mine();
    const auto v2 = validate_chain(state.chain(), state);
    const auto stored_agg = state.find_tx(ad);
    const auto updated = state.find_tx(d1);

    const bool total_ok = agg.total_amount == 12;
    const bool fallback_ok = v1.ok() && v1.fallback_links >= 1 && v2.ok();
    const bool agg_unchanged = stored_agg && std::get<AggTx>(*stored_agg) == agg &&
                               agg.aggregated_hashes == std::vector<Digest>{d1, d2};
    const bool update_ok = updated && to_string(data_of(*updated)) == "memo, corrected" && tx_hash(*updated, state) == d1;
    return {total_ok && fallback_ok && agg_unchanged && update_ok,
            "A -> [B,C] total " + std::to_string(agg.total_amount) + ", fallback links " +
                std::to_string(v1.fallback_links) + ", chain valid " + (fallback_ok ? "yes" : "no") +
                ", AggTx unchanged after update " + (agg_unchanged && update_ok ? "yes" : "no")};
}

// AC7 ------------------------------------------------------------------------
Outcome data_aggregation_constraint()
{
    const auto& c = clients();
    const ClientKeys* keys[] = {&c.alice, &c.bob, &c.carol};
    test::MemorySource src;
    for (const auto* k : keys) src.add_account(*k);
    SeededRandom rng(77);
    constexpr int trials = 500;
    int rejected = 0;
    for (int i = 0; i < trials; ++i) {
        const auto& from = *keys[rng.uniform(3)];
        Bytes a(rng.uniform(24)), b;
        rng.fill(a);
        do {
            b.resize(rng.uniform(24));
            rng.fill(b);
        } while (b == a);
        std::vector<DataTx> txs{make_data_tx(from, keys[rng.uniform(3)]->address(), 1, 1, a, rng),
                                make_data_tx(from, keys[rng.uniform(3)]->address(), 1, 2, b, rng)};
        try {
            aggregate_data(txs, src);
        } catch (const AggregationError&) {
            ++rejected;
        }
    }

    // a hand-built AggTx over unequal data must not get past a miner either
    Solo node({&c.alice, &c.bob}, 78);
    const Digest d1 = node.submit(make_data_tx(c.alice, c.bob.address(), 1, 1, to_bytes("one"), node.rng));
    const Digest d2 = node.submit(make_data_tx(c.alice, c.bob.address(), 1, 2, to_bytes("two"), node.rng));
    node.mine();
    AggTx forged;
    forged.kind = AggTx::Kind::Data;
    forged.from = {c.alice.address()};
    forged.to = {c.bob.address()};
    forged.shared_data = to_bytes("one");
    forged.aggregated_hashes = {d1, d2};
    node.submit(forged);
    const auto round = node.mine();
    const bool miner_rejects = round.block.agg_tx_list.empty();
    return {rejected == trials && miner_rejects,
            std::to_string(rejected) + "/" + std::to_string(trials) + " unequal-data aggregations rejected; miner " +
                (miner_rejects ? "rejects" : "accepts") + " a forged data AggTx"};
}

// AC8 ------------------------------------------------------------------------
Outcome sync_replay_equivalence()
{
    const std::string script = R"(
consensus roundrobin
difficulty 4
security_bits 128
block_interval 1000
node n1
node n2
node n3
node joiner late
link n1 n2 delay=20
link n2 n3 delay=35
link n1 n3 delay=25
link joiner n2 delay=15
at 10 account alice n1
at 10 account bob n2
at 10 account carol n3
at 1500 send data alice bob "{name: Alise}" n1 as=rec
at 1500 send funds bob carol 40 n2 data=invoice as=pay
at 2500 send data carol alice "note" n3 as=note
at 3500 update rec "{name: Alice}" n2 reason="typo fix"
at 3500 update pay "invoice 7" n2 reason=detail
at 4500 erase note n1 reason=gdpr
at 6500 join joiner n2
until 9000
)";
    int equal = 0;
    std::string bad;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto run = net::run_scenario(script, seed);
        auto& sim = *run.network;
        const auto live = sim.store("n1").dump();
        bool same = run.report.converged && !sim.sync_error("joiner") && sim.store("joiner").dump() == live &&
                    sim.miner("joiner").state().height() >= 8;
        for (const char* id : {"n2", "n3"}) same = same && sim.store(id).dump() == live;
        if (same) {
            ++equal;
        } else {
            bad += " " + std::to_string(seed);
        }
    }
    return {equal == 10, std::to_string(equal) + "/10 seeded scenarios give a joiner dump byte-identical to live nodes" +
                             (bad.empty() ? "" : " (failed seeds:" + bad + ")")};
}

// AC9 ------------------------------------------------------------------------
Outcome tamper_detection()
{
    const auto& c = clients();
    Solo node({&c.alice, &c.bob, &c.carol}, 99);
    const Digest d = node.submit(make_funds_tx(c.alice, c.bob.address(), 25, 2, 1, to_bytes("rent"), node.rng));
    node.mine();
    node.mine();
    auto& state = node.miner.state();
    const FundsTx original = std::get<FundsTx>(*state.find_tx(d));
    if (!validate_chain(state.chain(), state).ok()) return {false, "baseline chain invalid"};

    std::vector<std::pair<std::string, std::function<void(FundsTx&)>>> mutations;
    for (int byte = 0; byte < 8; ++byte) {
        const std::uint64_t mask = std::uint64_t{1} << (8 * byte);
        mutations.push_back({"amount", [mask](FundsTx& t) { t.amount ^= mask; }});
        mutations.push_back({"fee", [mask](FundsTx& t) { t.fee ^= mask; }});
    }
    for (int byte = 0; byte < 4; ++byte) {
        const std::uint32_t mask = std::uint32_t{1} << (8 * byte);
        mutations.push_back({"tx_cnt", [mask](FundsTx& t) { t.tx_cnt ^= mask; }});
    }
    for (std::size_t i = 0; i < Digest::size; ++i) {
        mutations.push_back({"from", [i](FundsTx& t) { t.from[i] ^= 0x01; }});
        mutations.push_back({"to", [i](FundsTx& t) { t.to[i] ^= 0x01; }});
    }
    mutations.push_back({"from", [&](FundsTx& t) { t.from = c.carol.address(); }});
    mutations.push_back({"to", [&](FundsTx& t) { t.to = c.carol.address(); }});
    const auto q = c.alice.chf.q;
    for (int delta : {1, 2, 3}) {
        mutations.push_back({"check_string.r", [=](FundsTx& t) { t.check_string.r = (t.check_string.r + delta) % q; }});
        mutations.push_back({"check_string.s", [=](FundsTx& t) { t.check_string.s = (t.check_string.s + delta) % q; }});
    }
    mutations.push_back({"check_string.r", [=](FundsTx& t) { t.check_string.r = q; }});  // out of range
    for (std::size_t i = 0; i < original.signature.size(); ++i) {
        mutations.push_back({"signature", [i](FundsTx& t) { t.signature[i] ^= 0x80; }});
    }
    mutations.push_back({"signature", [](FundsTx& t) { t.signature.pop_back(); }});

    int detected = 0;
    std::set<std::string> fields;
    std::string missed;
    for (const auto& [field, mutate] : mutations) {
        FundsTx t = original;
        mutate(t);
        if (t == original) continue;
        fields.insert(field);
        state.put_tx(d, t);
        const auto v = validate_chain(state.chain(), state);
        if (!v.ok() && v.violation->height == 2) {
            ++detected;
        } else {
            missed += " " + field;
        }
        state.put_tx(d, original);
    }
    const bool restored = validate_chain(state.chain(), state).ok();
    return {detected == static_cast<int>(mutations.size()) && fields.size() == 8 && restored,
            std::to_string(detected) + "/" + std::to_string(mutations.size()) + " mutations over " +
                std::to_string(fields.size()) + " non-Data fields caught at height 2" +
                (missed.empty() ? "" : " (missed:" + missed + ")")};
}

// AC10 -----------------------------------------------------------------------
std::size_t count_occurrences(const std::string& haystack, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
    return n;
}

Outcome erasure()
{
    const auto& c = clients();
    const fs::path dir = fs::temp_directory_path() / ("redact-ac10-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path file = dir / "chain.db";

    Digest target_key, fix_key;
    std::string dump;
    {
        Store store(file);
        Miner miner(store, quick());
        SeededRandom rng(1010);
        std::uint64_t ts = 0;
        for (const auto* k : {&c.alice, &c.bob}) miner.submit(make_account_tx(*k, 0, {}, rng));
        miner.mine(++ts);
        const Transaction target = make_data_tx(c.alice, c.bob.address(), 1, 1, to_bytes("{name: Alise}"), rng);
        target_key = *miner.submit(target);
        miner.mine(++ts);
        const UpdateTx fix = make_update(target, to_bytes("{name: Alice}"), to_bytes("typo fix"), 1, c.alice, rng);
        fix_key = *miner.submit(fix);
        miner.mine(++ts);
        const Transaction current = *miner.state().find_tx(target_key);
        miner.submit(make_update(current, {}, to_bytes("erase"), 1, c.alice, rng));
        miner.mine(++ts);
        dump = store.dump();
        store.close();
    }
    std::ifstream in(file, std::ios::binary);
    const std::string raw((std::istreambuf_iterator<char>(in)), {});
    fs::remove_all(dir);

    // logical view: which records mention each value
    auto records_with = [&](const std::string& value) {
        std::set<std::string> out;
        std::istringstream lines(dump);
        std::string line;
        const std::string hex = to_hex(to_bytes(value));
        while (std::getline(lines, line)) {
            if (line.find(hex) == std::string::npos) continue;
            const auto tab1 = line.find('\t');
            const auto tab2 = line.find('\t', tab1 + 1);
            out.insert(line.substr(0, tab1) + "/" + line.substr(tab1 + 1, tab2 - tab1 - 1));
        }
        return out;
    };
    const auto original_hits = records_with("Alise");
    const auto prior_hits = records_with("Alice");
    const std::set<std::string> expected = {"updatetx/" + fix_key.hex()};
    const auto raw_original = count_occurrences(raw, "Alise");
    const auto raw_prior = count_occurrences(raw, "Alice");

    const bool ok = original_hits.empty() && prior_hits == expected && raw_original == 0 && raw_prior == 1;
    return {ok, "original value found in " + std::to_string(original_hits.size()) + " records (" +
                    std::to_string(raw_original) + " raw bytes hits); prior value only in the first UpdateTx: " +
                    (prior_hits == expected ? "yes" : "no") + " (" + std::to_string(raw_prior) + " raw hit)"};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"AC1", collision_correctness},    {"AC2", tiny_group_oracle},
        {"AC3", update_non_invasive},      {"AC4", authorization_matrix},
        {"AC5", timeliness},               {"AC6", aggregation},
        {"AC7", data_aggregation_constraint}, {"AC8", sync_replay_equivalence},
        {"AC9", tamper_detection},         {"AC10", erasure},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << name << ' ' << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
