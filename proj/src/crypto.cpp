// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#include "redact/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <stdexcept>

namespace redact {

namespace {

struct PkeyDeleter {
    void operator()(EVP_PKEY* k) const { EVP_PKEY_free(k); }
};
struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

constexpr std::size_t kEd25519KeySize = 32;
constexpr std::size_t kEd25519SigSize = 64;

PkeyPtr private_key(ByteView secret)
{
    if (secret.size() != kEd25519KeySize) throw KeyError("signing secret key must be 32 bytes");
    PkeyPtr key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, secret.data(), secret.size()));
    if (!key) throw KeyError("malformed signing secret key");
    return key;
}

} // namespace

struct Hasher::Impl {
    MdCtxPtr ctx{EVP_MD_CTX_new()};
};

Hasher::Hasher() : impl_(std::make_unique<Impl>())
{
    if (!impl_->ctx || EVP_DigestInit_ex(impl_->ctx.get(), EVP_sha3_256(), nullptr) != 1) {
        throw std::runtime_error("SHA3-256 unavailable");
    }
}

Hasher::~Hasher() = default;

Hasher& Hasher::update(ByteView data)
{
    EVP_DigestUpdate(impl_->ctx.get(), data.data(), data.size());
    return *this;
}

Digest Hasher::finish()
{
    std::array<std::uint8_t, Digest::size> out{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(impl_->ctx.get(), out.data(), &len);
    return Digest(out);
}

Digest inner_hash(ByteView data)
{
    return Hasher().update(data).finish();
}

std::uint64_t RandomSource::next_u64()
{
    std::array<std::uint8_t, 8> b{};
    fill(b);
    std::uint64_t v = 0;
    for (auto x : b) v = (v << 8) | x;
    return v;
}

std::uint64_t RandomSource::uniform(std::uint64_t bound)
{
    if (bound == 0) throw std::invalid_argument("uniform bound must be nonzero");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
        std::uint64_t v = next_u64();
        if (v < limit) return v % bound;
    }
}

double RandomSource::unit()
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

void SeededRandom::fill(std::span<std::uint8_t> out)
{
    std::size_t i = 0;
    while (i < out.size()) {
        std::uint64_t v = engine_();
        for (int k = 0; k < 8 && i < out.size(); ++k, ++i) {
            out[i] = static_cast<std::uint8_t>(v >> (56 - 8 * k));
        }
    }
}

void SystemRandom::fill(std::span<std::uint8_t> out)
{
    if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
        throw std::runtime_error("RAND_bytes failed");
    }
}

SigningKeyPair generate_signing_key(RandomSource& rng)
{
    SigningKeyPair kp;
    kp.secret_key.resize(kEd25519KeySize);
    rng.fill(kp.secret_key);
    kp.public_key = signing_public_key(kp.secret_key);
    return kp;
}

Bytes signing_public_key(ByteView secret_key)
{
    auto key = private_key(secret_key);
    Bytes pub(kEd25519KeySize);
    std::size_t len = pub.size();
    if (EVP_PKEY_get_raw_public_key(key.get(), pub.data(), &len) != 1) {
        throw KeyError("cannot derive public key");
    }
    return pub;
}

Bytes sign_digest(ByteView secret_key, const Digest& message)
{
    auto key = private_key(secret_key);
    MdCtxPtr ctx(EVP_MD_CTX_new());
    Bytes sig(kEd25519SigSize);
    std::size_t len = sig.size();
    if (!ctx || EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1 ||
        EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(), Digest::size) != 1) {
        throw KeyError("signing failed");
    }
    sig.resize(len);
    return sig;
}

bool verify_digest(ByteView public_key, const Digest& message, ByteView signature)
{
    if (public_key.size() != kEd25519KeySize || signature.size() != kEd25519SigSize) return false;
    PkeyPtr key(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, public_key.data(), public_key.size()));
    if (!key) return false;
    MdCtxPtr ctx(EVP_MD_CTX_new());
    if (!ctx || EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1) return false;
    return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), message.data(), Digest::size) == 1;
}

Address address_of(ByteView public_key)
{
    return inner_hash(public_key);
}

} // namespace redact
