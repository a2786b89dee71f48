// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#ifndef REDACT_SCENARIO_HPP
#define REDACT_SCENARIO_HPP

#include "redact/network.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace redact::net {

/// Scenario scripts, one directive per line ('#' starts a comment):
///
///   seed 7                          consensus pow|roundrobin
///   difficulty 4                    block_interval 1000
///   security_bits 128               public_mode on|off
///   initial_balance 1000            until 20000
///   retries 3
///   node <id> [late]
///   link <a> <b> delay=<ticks> drop=<p>
///   at <tick> <command>
///
/// Commands:
///   account <client> <node>
///   send funds <from> <to> <amount> <node> [fee=N] [data=TEXT] [as=LABEL]
///   send data <from> <to> <text> <node> [fee=N] [as=LABEL]
///   update <label> <text> <node> [reason=TEXT] [fee=N] [as=LABEL]
///   erase <label> <node> [reason=TEXT] [fee=N] [as=LABEL]
///   mine <node>
///   join <node> <peer>
///   tamper <node> <label>
///   offline <node> | online <node>
///
/// Text arguments may be double-quoted. With block_interval set, a proposer
/// is picked every interval until `until`: in turn for round-robin, at
/// random for proof-of-work.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct NodeReport {
    NodeId id;
    bool online = true;
    std::uint64_t height = 0;
    Digest tip;
    Digest dump;
    std::optional<std::pair<std::uint64_t, std::string>> error;
};

struct UpdateReport {
    std::string label;
    Digest digest;
    std::optional<std::uint64_t> latency_blocks;
    std::optional<std::uint64_t> latency_ticks;
};

struct ScenarioReport {
    std::uint64_t seed = 0;
    std::vector<NodeReport> nodes;
    std::vector<UpdateReport> updates;
    std::size_t messages = 0;
    Digest trace;
    bool converged = false;

    std::string text() const;
};

/// The network and transaction labels stay available for inspection.
struct ScenarioRun {
    std::unique_ptr<SimNetwork> network;
    ScenarioReport report;
    std::map<std::string, Digest> labels;
};

/// Parses and runs a script. `seed` overrides the script's seed line.
/// Throws ScenarioError for malformed input.
ScenarioRun run_scenario(std::string_view script, std::optional<std::uint64_t> seed = std::nullopt);

} // namespace redact::net

#endif // REDACT_SCENARIO_HPP
