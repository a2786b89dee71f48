// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#ifndef REDACT_CRYPTO_HPP
#define REDACT_CRYPTO_HPP

#include "redact/bytes.hpp"

#include <cstdint>
#include <memory>
#include <random>

namespace redact {

/// The single digest primitive used everywhere (SHA3-256).
Digest inner_hash(ByteView data);

/// Incremental form of inner_hash.
class Hasher {
public:
    Hasher();
    ~Hasher();
    Hasher(const Hasher&) = delete;
    Hasher& operator=(const Hasher&) = delete;

    Hasher& update(ByteView data);
    Digest finish();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Source of uniformly random bytes. Implementations need not be thread-safe.
class RandomSource {
public:
    virtual ~RandomSource() = default;
    virtual void fill(std::span<std::uint8_t> out) = 0;

    std::uint64_t next_u64();
    /// Uniform in [0, bound). bound must be nonzero.
    std::uint64_t uniform(std::uint64_t bound);
    /// Uniform in [0, 1).
    double unit();
};

/// Deterministic generator for simulation and tests.
class SeededRandom final : public RandomSource {
public:
    explicit SeededRandom(std::uint64_t seed) : engine_(seed) {}
    void fill(std::span<std::uint8_t> out) override;

private:
    std::mt19937_64 engine_;
};

/// Operating-system entropy (OpenSSL RAND_bytes).
class SystemRandom final : public RandomSource {
public:
    void fill(std::span<std::uint8_t> out) override;
};

/// Ed25519 key pair. The secret is the 32-byte seed.
struct SigningKeyPair {
    Bytes secret_key;
    Bytes public_key;
};

using Address = Digest;

class KeyError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

SigningKeyPair generate_signing_key(RandomSource& rng);
/// Derives the public key from a 32-byte secret seed. Throws KeyError.
Bytes signing_public_key(ByteView secret_key);
/// Deterministic Ed25519 signature. Throws KeyError on a malformed key.
Bytes sign_digest(ByteView secret_key, const Digest& message);
/// Malformed keys or signatures yield false.
bool verify_digest(ByteView public_key, const Digest& message, ByteView signature);

/// Account address: inner_hash of the signing public key.
Address address_of(ByteView public_key);

} // namespace redact

#endif // REDACT_CRYPTO_HPP
