// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#ifndef REDACT_TESTS_MEMORY_SOURCE_HPP
#define REDACT_TESTS_MEMORY_SOURCE_HPP

#include "redact/ledger.hpp"

#include <map>

namespace test {

/// Plain maps standing in for node storage.
struct MemorySource : redact::TxSource {
    std::map<redact::Address, redact::chf::ChameleonParameters> params;
    std::map<redact::Address, redact::Bytes> keys;
    std::map<redact::Digest, redact::Transaction> txs;

    void add_account(const redact::ClientKeys& k)
    {
        params[k.address()] = redact::chf::sanitize(k.chf);
        keys[k.address()] = k.signing.public_key;
    }

    redact::Digest add(const redact::Transaction& tx)
    {
        auto h = redact::tx_hash(tx, *this);
        txs[*h] = tx;
        return *h;
    }

    std::optional<redact::chf::ChameleonParameters> parameters_of(const redact::Address& a) const override
    {
        auto it = params.find(a);
        if (it == params.end()) return std::nullopt;
        return it->second;
    }

    std::optional<redact::Bytes> signing_key_of(const redact::Address& a) const override
    {
        auto it = keys.find(a);
        if (it == keys.end()) return std::nullopt;
        return it->second;
    }

    std::optional<redact::Transaction> find_tx(const redact::Digest& d) const override
    {
        auto it = txs.find(d);
        if (it == txs.end()) return std::nullopt;
        return it->second;
    }
};

} // namespace test

#endif // REDACT_TESTS_MEMORY_SOURCE_HPP
