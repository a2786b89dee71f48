// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#ifndef REDACT_TESTS_FIXTURES_HPP
#define REDACT_TESTS_FIXTURES_HPP

#include "redact/transactions.hpp"

namespace test {

inline redact::Address address_with(std::uint8_t fill)
{
    std::array<std::uint8_t, 32> b{};
    b.fill(fill);
    return redact::Address(b);
}

struct World {
    redact::ClientKeys alice;
    redact::ClientKeys bob;
    redact::ClientKeys carol;
};

/// Three clients with 128-bit groups, generated once per process.
inline const World& world()
{
    static const World w = [] {
        redact::SeededRandom rng(20260101);
        World out;
        out.alice = redact::generate_client_keys(128, rng);
        out.bob = redact::generate_client_keys(128, rng);
        out.carol = redact::generate_client_keys(128, rng);
        return out;
    }();
    return w;
}

} // namespace test

#endif // REDACT_TESTS_FIXTURES_HPP
