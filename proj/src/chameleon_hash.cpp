// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#include "redact/chameleon_hash.hpp"

#include <array>
#include <string>
#include <vector>

namespace redact::chf {

namespace {

constexpr int kPrimalityReps = 25;

const std::vector<unsigned>& small_primes()
{
    static const std::vector<unsigned> primes = [] {
        constexpr unsigned limit = 40000;
        std::vector<bool> composite(limit, false);
        std::vector<unsigned> out;
        for (unsigned i = 3; i < limit; i += 2) {
            if (composite[i]) continue;
            out.push_back(i);
            for (unsigned j = i * i; j < limit; j += 2 * i) composite[j] = true;
        }
        return out;
    }();
    return primes;
}

BigUint mod_floor(const BigUint& a, const BigUint& m)
{
    BigUint r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

BigUint powm(const BigUint& base, const BigUint& exp, const BigUint& mod)
{
    BigUint r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
    return r;
}

bool is_probable_prime(const BigUint& n)
{
    return mpz_probab_prime_p(n.get_mpz_t(), kPrimalityReps) > 0;
}

std::size_t bit_length(const BigUint& v)
{
    return v == 0 ? 0 : mpz_sizeinbase(v.get_mpz_t(), 2);
}

/// Uniform value with exactly `bits` bits (top bit set).
BigUint random_with_bits(unsigned bits, RandomSource& rng)
{
    Bytes buf((bits + 7) / 8);
    rng.fill(buf);
    BigUint v = decode_scalar(buf);
    mpz_fdiv_r_2exp(v.get_mpz_t(), v.get_mpz_t(), bits);
    mpz_setbit(v.get_mpz_t(), bits - 1);
    return v;
}

/// Uniform in [0, bound) by rejection sampling.
BigUint random_below(const BigUint& bound, RandomSource& rng)
{
    const std::size_t bits = bit_length(bound);
    Bytes buf((bits + 7) / 8);
    for (;;) {
        rng.fill(buf);
        BigUint v = decode_scalar(buf);
        mpz_fdiv_r_2exp(v.get_mpz_t(), v.get_mpz_t(), bits);
        if (v < bound) return v;
    }
}

/// Uniform in [1, q - 1].
BigUint random_scalar(const BigUint& q, RandomSource& rng)
{
    return random_below(q - 1, rng) + 1;
}

/// Searches upward from a random odd start for q with q and 2q + 1 both prime.
/// Candidates are sieved so that neither q nor 2q + 1 has a small odd factor.
BigUint find_sophie_germain_prime(unsigned q_bits, RandomSource& rng)
{
    // Sieve primes must stay below the smallest candidate q.
    std::vector<unsigned> primes;
    for (unsigned r : small_primes()) {
        if (q_bits > 17 || r < (1u << (q_bits - 1))) primes.push_back(r);
    }
    constexpr unsigned kWindow = 1u << 16;
    std::vector<unsigned> residues(primes.size());

    for (;;) {
        BigUint start = random_with_bits(q_bits, rng);
        mpz_setbit(start.get_mpz_t(), 0);
        for (std::size_t i = 0; i < primes.size(); ++i) {
            residues[i] = static_cast<unsigned>(mpz_fdiv_ui(start.get_mpz_t(), primes[i]));
        }
        for (unsigned delta = 0; delta < kWindow; delta += 2) {
            bool sieved = false;
            for (std::size_t i = 0; i < primes.size(); ++i) {
                const unsigned r = primes[i];
                const unsigned qr = (residues[i] + delta) % r;
                if (qr == 0 || (2 * qr + 1) % r == 0) {
                    sieved = true;
                    break;
                }
            }
            if (sieved) continue;

            BigUint q = start + delta;
            if (bit_length(q) != q_bits) break;
            BigUint p = 2 * q + 1;
            // Fermat base 2 on p first: it rejects almost every composite cheaply.
            if (powm(2, p - 1, p) != 1) continue;
            if (is_probable_prime(q) && is_probable_prime(p)) return q;
        }
    }
}

BigUint chameleon_scalar(const ChameleonParameters& params, const CheckString& check, ByteView message)
{
    const BigUint e = hash_to_scalar(message, check.r, params.q);
    const BigUint t = mod_floor(powm(params.hk, e, params.p) * powm(params.g, check.s, params.p), params.p);
    return mod_floor(check.r - t, params.q);
}

void check_range(const CheckString& check, const BigUint& q)
{
    if (sgn(check.r) < 0 || check.r >= q || sgn(check.s) < 0 || check.s >= q) {
        throw InvalidCheckString("check string component outside [0, q)");
    }
}

} // namespace

Bytes encode_scalar(const BigUint& v)
{
    if (sgn(v) < 0) throw std::invalid_argument("negative scalar");
    if (v == 0) return {};
    Bytes out((mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8);
    std::size_t count = 0;
    mpz_export(out.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
    out.resize(count);
    return out;
}

BigUint decode_scalar(ByteView bytes)
{
    BigUint v;
    if (!bytes.empty()) mpz_import(v.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
    return v;
}

Bytes encode_fixed(const BigUint& v, std::size_t width)
{
    Bytes minimal = encode_scalar(v);
    if (minimal.size() > width) throw std::invalid_argument("scalar wider than fixed width");
    Bytes out(width - minimal.size(), 0);
    out.insert(out.end(), minimal.begin(), minimal.end());
    return out;
}

std::size_t scalar_width(const BigUint& q)
{
    return (bit_length(q) + 7) / 8;
}

BigUint hash_to_scalar(ByteView message, const BigUint& r, const BigUint& q)
{
    ByteWriter w;
    w.raw(message).prefixed(encode_scalar(r));
    const Digest h = inner_hash(w.bytes());
    return mod_floor(decode_scalar(h.view()), q);
}

ChameleonParameters generate_parameters(unsigned security_bits, RandomSource& rng)
{
    if (security_bits < kMinSecurityBits) {
        throw InvalidParameters("security_bits " + std::to_string(security_bits) + " below minimum " +
                                std::to_string(kMinSecurityBits));
    }
    ChameleonParameters group;
    group.q = find_sophie_germain_prime(security_bits - 1, rng);
    group.p = 2 * group.q + 1;
    // Squares of elements other than +-1 generate the order-q subgroup.
    do {
        BigUint h = random_below(group.p - 3, rng) + 2;
        group.g = powm(h, 2, group.p);
    } while (group.g == 1);
    return generate_keys(group, rng);
}

ChameleonParameters generate_keys(const ChameleonParameters& group, RandomSource& rng)
{
    ChameleonParameters out{group.g, group.p, group.q, 0, std::nullopt};
    out.tk = random_scalar(out.q, rng);
    out.hk = powm(out.g, *out.tk, out.p);
    return out;
}

ChameleonParameters parameters_from_trapdoor(const BigUint& p, const BigUint& q, const BigUint& g,
                                             const BigUint& tk)
{
    ChameleonParameters out{g, p, q, powm(g, tk, p), tk};
    validate_parameters(out);
    return out;
}

void validate_parameters(const ChameleonParameters& params)
{
    const auto& [g, p, q, hk, tk] = params;
    if (q < 3 || p != 2 * q + 1) throw InvalidParameters("p must equal 2q + 1");
    if (!is_probable_prime(q) || !is_probable_prime(p)) throw InvalidParameters("p and q must be prime");
    if (g <= 1 || g >= p || powm(g, q, p) != 1) throw InvalidParameters("g must have order q");
    if (hk <= 1 || hk >= p || powm(hk, q, p) != 1) throw InvalidParameters("hk must lie in the order-q subgroup");
    if (tk) {
        if (*tk < 1 || *tk >= q) throw InvalidParameters("tk outside [1, q-1]");
        if (powm(g, *tk, p) != hk) throw InvalidParameters("hk != g^tk mod p");
    }
}

ChameleonParameters sanitize(const ChameleonParameters& params)
{
    ChameleonParameters out = params;
    out.tk.reset();
    return out;
}

CheckString random_check_string(const ChameleonParameters& params, RandomSource& rng)
{
    CheckString c;
    c.r = random_scalar(params.q, rng);
    c.s = random_scalar(params.q, rng);
    return c;
}

Digest chameleon_hash(const ChameleonParameters& params, const CheckString& check, ByteView message)
{
    check_range(check, params.q);
    const BigUint ch = chameleon_scalar(params, check, message);
    return inner_hash(encode_fixed(ch, scalar_width(params.q)));
}

bool verify(const ChameleonParameters& params, ByteView message, const Digest& digest,
            const CheckString& check)
{
    try {
        if (params.q < 3 || params.p != 2 * params.q + 1) return false;
        return chameleon_hash(params, check, message) == digest;
    } catch (const std::exception&) {
        return false;
    }
}

CheckString find_collision(const ChameleonParameters& params, ByteView old_message,
                           const CheckString& old_check, ByteView new_message, RandomSource& rng)
{
    if (!params.tk) throw MissingTrapdoor("collision requires the trapdoor key");
    check_range(old_check, params.q);
    const BigUint ch = chameleon_scalar(params, old_check, old_message);
    const BigUint k = random_scalar(params.q, rng);
    CheckString out;
    out.r = mod_floor(ch + powm(params.g, k, params.p), params.q);
    const BigUint e = hash_to_scalar(new_message, out.r, params.q);
    out.s = mod_floor(k - e * *params.tk, params.q);
    return out;
}

void write_parameters(ByteWriter& w, const ChameleonParameters& params)
{
    w.prefixed(encode_scalar(params.g));
    w.prefixed(encode_scalar(params.p));
    w.prefixed(encode_scalar(params.q));
    w.prefixed(encode_scalar(params.hk));
}

ChameleonParameters read_parameters(ByteReader& r)
{
    ChameleonParameters out;
    out.g = decode_scalar(r.prefixed());
    out.p = decode_scalar(r.prefixed());
    out.q = decode_scalar(r.prefixed());
    out.hk = decode_scalar(r.prefixed());
    return out;
}

void write_check_string(ByteWriter& w, const CheckString& check)
{
    w.prefixed(encode_scalar(check.r));
    w.prefixed(encode_scalar(check.s));
}

CheckString read_check_string(ByteReader& r)
{
    CheckString out;
    out.r = decode_scalar(r.prefixed());
    out.s = decode_scalar(r.prefixed());
    return out;
}

Bytes encode_parameters(const ChameleonParameters& params)
{
    ByteWriter w;
    write_parameters(w, params);
    return w.take();
}

ChameleonParameters decode_parameters(ByteView bytes)
{
    ByteReader r(bytes);
    auto out = read_parameters(r);
    r.expect_done();
    return out;
}

Bytes encode_check_string(const CheckString& check)
{
    ByteWriter w;
    write_check_string(w, check);
    return w.take();
}

CheckString decode_check_string(ByteView bytes)
{
    ByteReader r(bytes);
    auto out = read_check_string(r);
    r.expect_done();
    return out;
}

} // namespace redact::chf
