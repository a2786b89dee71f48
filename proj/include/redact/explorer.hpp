// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#ifndef REDACT_EXPLORER_HPP
#define REDACT_EXPLORER_HPP

#include "redact/ledger.hpp"
#include "redact/miner.hpp"

#include "json.hpp"

namespace redact {

using Json = nlohmann::ordered_json;

/// Explorer record of a transaction. Fields keep declaration order; byte
/// fields are hex, and data, reason and new_data also get a "_text" copy
/// when they are printable UTF-8. `digest` is included when given.
Json tx_to_json(const Transaction& tx, const std::optional<Digest>& digest = std::nullopt);
/// Inverse of tx_to_json (the "_text" copies and the digest are ignored).
/// Throws DecodeError on missing or malformed fields.
Transaction tx_from_json(const Json& j);

Json block_to_json(const Block& b);
Json account_to_json(const Account& a);
Json decision_to_json(const Decision& d);

} // namespace redact

#endif // REDACT_EXPLORER_HPP
