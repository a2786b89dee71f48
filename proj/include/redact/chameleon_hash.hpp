// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#ifndef REDACT_CHAMELEON_HASH_HPP
#define REDACT_CHAMELEON_HASH_HPP

#include "redact/bytes.hpp"
#include "redact/crypto.hpp"

#include <gmpxx.h>

#include <optional>

/// Discrete-log chameleon hash over the order-q subgroup of Z_p*, p = 2q + 1.
///
/// Hashing a message m under check string (r, s):
///
///     e  = H(m || enc(r)) mod q
///     ch = (r - (hk^e * g^s mod p)) mod q
///     digest = H(ch as fixed-width big-endian)
///
/// With the trapdoor tk (hk = g^tk) a new check string for any m' is found by
/// picking k, setting r' = (ch + (g^k mod p)) mod q, e' = H(m' || enc(r')) mod q
/// and s' = (k - e' * tk) mod q, since then hk^e' * g^s' = g^k.
namespace redact::chf {

using BigUint = mpz_class;

constexpr unsigned kMinSecurityBits = 16;
constexpr unsigned kDefaultSecurityBits = 1024;

class InvalidParameters : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised by find_collision when the trapdoor key is absent.
class MissingTrapdoor : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class InvalidCheckString : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ChameleonParameters {
    BigUint g;
    BigUint p;
    BigUint q;
    BigUint hk;
    std::optional<BigUint> tk;

    bool has_trapdoor() const { return tk.has_value(); }
    bool operator==(const ChameleonParameters&) const = default;
};

struct CheckString {
    BigUint r;
    BigUint s;

    bool operator==(const CheckString&) const = default;
};

/// Fresh safe-prime group of `security_bits` bits plus a key pair.
/// Throws InvalidParameters when security_bits < kMinSecurityBits.
ChameleonParameters generate_parameters(unsigned security_bits, RandomSource& rng);

/// Fresh key pair (tk, hk) over the group of `group`.
ChameleonParameters generate_keys(const ChameleonParameters& group, RandomSource& rng);

/// Builds parameters from an explicit group and trapdoor, checking every
/// invariant. Used for fixed test groups.
ChameleonParameters parameters_from_trapdoor(const BigUint& p, const BigUint& q, const BigUint& g,
                                             const BigUint& tk);

/// Throws InvalidParameters if any structural or primality invariant fails.
void validate_parameters(const ChameleonParameters& params);

/// Copy with tk removed. Never mutates the input.
ChameleonParameters sanitize(const ChameleonParameters& params);

/// (r, s) drawn uniformly from [1, q-1].
CheckString random_check_string(const ChameleonParameters& params, RandomSource& rng);

/// Throws InvalidCheckString when r or s is not in [0, q).
Digest chameleon_hash(const ChameleonParameters& params, const CheckString& check, ByteView message);

/// Recompute-and-compare. Never throws.
bool verify(const ChameleonParameters& params, ByteView message, const Digest& digest,
            const CheckString& check);

/// New check string such that verify(params, new_message, d, result) holds for
/// d = chameleon_hash(params, old_check, old_message). Requires tk.
CheckString find_collision(const ChameleonParameters& params, ByteView old_message,
                           const CheckString& old_check, ByteView new_message, RandomSource& rng);

// Scalar helpers exposed for tests and oracles.
Bytes encode_scalar(const BigUint& v);              // minimal big-endian, zero -> empty
BigUint decode_scalar(ByteView bytes);
Bytes encode_fixed(const BigUint& v, std::size_t width); // left-padded big-endian
std::size_t scalar_width(const BigUint& q);           // ceil(bits(q) / 8)
BigUint hash_to_scalar(ByteView message, const BigUint& r, const BigUint& q);

/// g, p, q, hk as 4-byte length + magnitude. tk is never written.
Bytes encode_parameters(const ChameleonParameters& params);
ChameleonParameters decode_parameters(ByteView bytes);
Bytes encode_check_string(const CheckString& check);
CheckString decode_check_string(ByteView bytes);

void write_parameters(ByteWriter& w, const ChameleonParameters& params);
ChameleonParameters read_parameters(ByteReader& r);
void write_check_string(ByteWriter& w, const CheckString& check);
CheckString read_check_string(ByteReader& r);

} // namespace redact::chf

#endif // REDACT_CHAMELEON_HASH_HPP
