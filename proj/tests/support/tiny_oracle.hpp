// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

// Brute-force reference for the chameleon hash over groups small enough for
// 64-bit arithmetic. Shares only the SHA3 primitive with the library: scalar
// encoding, modular exponentiation and reduction are written out separately.

#ifndef REDACT_TESTS_TINY_ORACLE_HPP
#define REDACT_TESTS_TINY_ORACLE_HPP

#include "redact/crypto.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

struct TinyGroup {
    std::uint64_t p, q, g, tk, hk;
};

inline std::uint64_t pow_by_multiplication(std::uint64_t base, std::uint64_t exp, std::uint64_t mod)
{
    std::uint64_t acc = 1 % mod;
    for (std::uint64_t i = 0; i < exp; ++i) acc = (acc * base) % mod;
    return acc;
}

inline TinyGroup make_group(std::uint64_t p, std::uint64_t q, std::uint64_t g, std::uint64_t tk)
{
    return {p, q, g, tk, pow_by_multiplication(g, tk, p)};
}

inline std::vector<std::uint8_t> minimal_be(std::uint64_t v)
{
    std::vector<std::uint8_t> out;
    while (v) {
        out.insert(out.begin(), static_cast<std::uint8_t>(v & 0xff));
        v >>= 8;
    }
    return out;
}

inline std::uint64_t digest_mod(const redact::Digest& d, std::uint64_t q)
{
    // Horner over the 32 big-endian bytes, reducing at each step.
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < redact::Digest::size; ++i) acc = (acc * 256 + d[i]) % q;
    return acc;
}

inline std::uint64_t challenge(const TinyGroup& grp, const std::string& message, std::uint64_t r)
{
    std::vector<std::uint8_t> buf(message.begin(), message.end());
    auto rb = minimal_be(r);
    const auto n = static_cast<std::uint32_t>(rb.size());
    buf.push_back(static_cast<std::uint8_t>(n >> 24));
    buf.push_back(static_cast<std::uint8_t>(n >> 16));
    buf.push_back(static_cast<std::uint8_t>(n >> 8));
    buf.push_back(static_cast<std::uint8_t>(n));
    buf.insert(buf.end(), rb.begin(), rb.end());
    return digest_mod(redact::inner_hash(buf), grp.q);
}

inline std::uint64_t ch_value(const TinyGroup& grp, const std::string& message, std::uint64_t r, std::uint64_t s)
{
    const std::uint64_t e = challenge(grp, message, r);
    const std::uint64_t t = pow_by_multiplication(grp.hk, e, grp.p) * pow_by_multiplication(grp.g, s, grp.p) % grp.p;
    const std::int64_t diff = static_cast<std::int64_t>(r) - static_cast<std::int64_t>(t);
    const auto q = static_cast<std::int64_t>(grp.q);
    return static_cast<std::uint64_t>(((diff % q) + q) % q);
}

inline redact::Digest digest(const TinyGroup& grp, const std::string& message, std::uint64_t r, std::uint64_t s)
{
    std::uint64_t width = 0;
    for (std::uint64_t x = grp.q; x; x >>= 8) ++width;
    std::vector<std::uint8_t> enc(width, 0);
    std::uint64_t ch = ch_value(grp, message, r, s);
    for (std::uint64_t i = width; i-- > 0; ch >>= 8) enc[i] = static_cast<std::uint8_t>(ch & 0xff);
    return redact::inner_hash(enc);
}

} // namespace oracle

#endif // REDACT_TESTS_TINY_ORACLE_HPP
