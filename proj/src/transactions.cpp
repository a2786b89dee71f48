// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#include "redact/transactions.hpp"

namespace redact {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

// Field encoders: every field is a 4-byte length followed by its bytes.
void put_u8(ByteWriter& w, std::uint8_t v) { w.u32(1).u8(v); }
void put_u32(ByteWriter& w, std::uint32_t v) { w.u32(4).u32(v); }
void put_u64(ByteWriter& w, std::uint64_t v) { w.u32(8).u64(v); }
void put_digest(ByteWriter& w, const Digest& d) { w.u32(Digest::size).digest(d); }
void put_bytes(ByteWriter& w, ByteView b) { w.prefixed(b); }
void put_params(ByteWriter& w, const chf::ChameleonParameters& p) { w.prefixed(chf::encode_parameters(p)); }
void put_check(ByteWriter& w, const chf::CheckString& c) { w.prefixed(chf::encode_check_string(c)); }

void put_digest_list(ByteWriter& w, const std::vector<Digest>& list)
{
    ByteWriter inner;
    for (const auto& d : list) inner.digest(d);
    w.prefixed(inner.bytes());
}

void expect_width(std::uint32_t got, std::uint32_t want)
{
    if (got != want) throw DecodeError("field width " + std::to_string(got) + ", expected " + std::to_string(want));
}

std::uint8_t get_u8(ByteReader& r)
{
    expect_width(r.u32(), 1);
    return r.u8();
}

std::uint32_t get_u32(ByteReader& r)
{
    expect_width(r.u32(), 4);
    return r.u32();
}

std::uint64_t get_u64(ByteReader& r)
{
    expect_width(r.u32(), 8);
    return r.u64();
}

Digest get_digest(ByteReader& r)
{
    expect_width(r.u32(), Digest::size);
    return r.digest();
}

chf::ChameleonParameters get_params(ByteReader& r)
{
    return chf::decode_parameters(r.prefixed());
}

chf::CheckString get_check(ByteReader& r)
{
    return chf::decode_check_string(r.prefixed());
}

std::vector<Digest> get_digest_list(ByteReader& r)
{
    const Bytes raw = r.prefixed();
    if (raw.size() % Digest::size != 0) throw DecodeError("digest list length not a multiple of 32");
    std::vector<Digest> out;
    ByteReader inner(raw);
    while (!inner.done()) out.push_back(inner.digest());
    return out;
}

void write_fields(ByteWriter& w, const Transaction& tx)
{
    w.u8(static_cast<std::uint8_t>(type_of(tx)));
    std::visit(overloaded{
                   [&](const AccountTx& t) {
                       put_digest(w, t.issuer);
                       put_bytes(w, t.public_key);
                       put_u64(w, t.fee);
                       put_params(w, t.parameters);
                       put_bytes(w, t.data);
                   },
                   [&](const FundsTx& t) {
                       put_u64(w, t.amount);
                       put_u64(w, t.fee);
                       put_u32(w, t.tx_cnt);
                       put_digest(w, t.from);
                       put_digest(w, t.to);
                       put_bytes(w, t.data);
                   },
                   [&](const DataTx& t) {
                       put_u64(w, t.fee);
                       put_u32(w, t.tx_cnt);
                       put_digest(w, t.from);
                       put_digest(w, t.to);
                       put_bytes(w, t.data);
                   },
                   [&](const AggTx& t) {
                       put_digest_list(w, t.from);
                       put_digest_list(w, t.to);
                       put_u8(w, static_cast<std::uint8_t>(t.kind));
                       if (t.kind == AggTx::Kind::Funds) {
                           put_u64(w, t.total_amount);
                       } else {
                           put_bytes(w, t.shared_data);
                       }
                       put_digest_list(w, t.aggregated_hashes);
                   },
                   [&](const UpdateTx& t) {
                       put_digest(w, t.tx_to_update_hash);
                       put_check(w, t.tx_to_update_check_string);
                       put_bytes(w, t.tx_to_update_data);
                       put_digest(w, t.issuer);
                       put_u64(w, t.fee);
                       put_bytes(w, t.data);
                       put_bytes(w, t.reason);
                   },
               },
               tx);
}

Transaction read_tx(ByteReader& r)
{
    const auto header = r.u8();
    switch (static_cast<TxType>(header)) {
    case TxType::Account: {
        AccountTx t;
        t.issuer = get_digest(r);
        t.public_key = r.prefixed();
        t.fee = get_u64(r);
        t.parameters = get_params(r);
        t.data = r.prefixed();
        t.check_string = get_check(r);
        t.signature = r.prefixed();
        return t;
    }
    case TxType::Funds: {
        FundsTx t;
        t.amount = get_u64(r);
        t.fee = get_u64(r);
        t.tx_cnt = get_u32(r);
        t.from = get_digest(r);
        t.to = get_digest(r);
        t.data = r.prefixed();
        t.check_string = get_check(r);
        t.signature = r.prefixed();
        return t;
    }
    case TxType::Data: {
        DataTx t;
        t.fee = get_u64(r);
        t.tx_cnt = get_u32(r);
        t.from = get_digest(r);
        t.to = get_digest(r);
        t.data = r.prefixed();
        t.check_string = get_check(r);
        t.signature = r.prefixed();
        return t;
    }
    case TxType::Agg: {
        AggTx t;
        t.from = get_digest_list(r);
        t.to = get_digest_list(r);
        const auto kind = get_u8(r);
        if (kind > 1) throw DecodeError("unknown aggregation kind");
        t.kind = static_cast<AggTx::Kind>(kind);
        if (t.kind == AggTx::Kind::Funds) {
            t.total_amount = get_u64(r);
        } else {
            t.shared_data = r.prefixed();
        }
        t.aggregated_hashes = get_digest_list(r);
        return t;
    }
    case TxType::Update: {
        UpdateTx t;
        t.tx_to_update_hash = get_digest(r);
        t.tx_to_update_check_string = get_check(r);
        t.tx_to_update_data = r.prefixed();
        t.issuer = get_digest(r);
        t.fee = get_u64(r);
        t.data = r.prefixed();
        t.reason = r.prefixed();
        t.check_string = get_check(r);
        t.signature = r.prefixed();
        return t;
    }
    }
    throw DecodeError("unknown transaction header " + std::to_string(header));
}

template <class T>
T sign_typed(T tx, ByteView secret, const chf::ChameleonParameters& params)
{
    tx.signature = sign_digest(secret, tx_hash(tx, params));
    return tx;
}

} // namespace

std::string_view tx_type_name(TxType type)
{
    switch (type) {
    case TxType::Account: return "account";
    case TxType::Funds: return "funds";
    case TxType::Data: return "data";
    case TxType::Agg: return "agg";
    case TxType::Update: return "update";
    }
    return "unknown";
}

TxType type_of(const Transaction& tx)
{
    return std::visit([](const auto& t) { return std::decay_t<decltype(t)>::type; }, tx);
}

bool is_data_bearing(const Transaction& tx)
{
    return !std::holds_alternative<AggTx>(tx);
}

std::optional<Address> owner_of(const Transaction& tx)
{
    return std::visit(overloaded{
                          [](const AccountTx& t) -> std::optional<Address> { return t.issuer; },
                          [](const FundsTx& t) -> std::optional<Address> { return t.from; },
                          [](const DataTx& t) -> std::optional<Address> { return t.from; },
                          [](const AggTx&) -> std::optional<Address> { return std::nullopt; },
                          [](const UpdateTx& t) -> std::optional<Address> { return t.issuer; },
                      },
                      tx);
}

const Bytes& data_of(const Transaction& tx)
{
    return std::visit(overloaded{
                          [](const AggTx&) -> const Bytes& { throw TransactionError("AggTx has no Data field"); },
                          [](const auto& t) -> const Bytes& { return t.data; },
                      },
                      tx);
}

const chf::CheckString& check_string_of(const Transaction& tx)
{
    return std::visit(overloaded{
                          [](const AggTx&) -> const chf::CheckString& {
                              throw TransactionError("AggTx has no check string");
                          },
                          [](const auto& t) -> const chf::CheckString& { return t.check_string; },
                      },
                      tx);
}

const Bytes& signature_of(const Transaction& tx)
{
    return std::visit(overloaded{
                          [](const AggTx&) -> const Bytes& { throw TransactionError("AggTx is unsigned"); },
                          [](const auto& t) -> const Bytes& { return t.signature; },
                      },
                      tx);
}

Transaction with_data(const Transaction& tx, Bytes data, chf::CheckString check_string)
{
    return std::visit(overloaded{
                          [](const AggTx&) -> Transaction { throw TransactionError("AggTx has no Data field"); },
                          [&](auto t) -> Transaction {
                              t.data = std::move(data);
                              t.check_string = std::move(check_string);
                              return t;
                          },
                      },
                      tx);
}

Bytes canonical_fields(const Transaction& tx)
{
    ByteWriter w;
    write_fields(w, tx);
    return w.take();
}

Digest tx_message(const Transaction& tx)
{
    return inner_hash(canonical_fields(tx));
}

Digest tx_hash(const Transaction& tx, const chf::ChameleonParameters& issuer_params)
{
    if (std::holds_alternative<AggTx>(tx)) return tx_message(tx);
    return chf::chameleon_hash(issuer_params, check_string_of(tx), tx_message(tx).view());
}

std::optional<chf::ChameleonParameters> hashing_parameters(const Transaction& tx, const AccountDirectory& accounts)
{
    if (const auto* acc = std::get_if<AccountTx>(&tx)) return acc->parameters;
    if (std::holds_alternative<AggTx>(tx)) return chf::ChameleonParameters{};
    return accounts.parameters_of(*owner_of(tx));
}

std::optional<Digest> tx_hash(const Transaction& tx, const AccountDirectory& accounts)
{
    auto params = hashing_parameters(tx, accounts);
    if (!params) return std::nullopt;
    try {
        return tx_hash(tx, *params);
    } catch (const chf::InvalidCheckString&) {
        return std::nullopt;
    }
}

Bytes encode_tx(const Transaction& tx)
{
    ByteWriter w;
    write_fields(w, tx);
    if (!std::holds_alternative<AggTx>(tx)) {
        put_check(w, check_string_of(tx));
        put_bytes(w, signature_of(tx));
    }
    return w.take();
}

Transaction decode_tx(ByteView bytes)
{
    ByteReader r(bytes);
    auto tx = read_tx(r);
    r.expect_done();
    return tx;
}

Transaction sign_tx(const Transaction& tx, ByteView signing_secret_key, const chf::ChameleonParameters& issuer_params)
{
    return std::visit(overloaded{
                          [](const AggTx&) -> Transaction { throw TransactionError("AggTx is not signed"); },
                          [&](const auto& t) -> Transaction { return sign_typed(t, signing_secret_key, issuer_params); },
                      },
                      tx);
}

bool verify_signature(const Transaction& tx, ByteView signing_public_key, const chf::ChameleonParameters& issuer_params)
{
    if (std::holds_alternative<AggTx>(tx)) return false;
    try {
        return verify_digest(signing_public_key, tx_hash(tx, issuer_params), signature_of(tx));
    } catch (const std::exception&) {
        return false;
    }
}

ClientKeys generate_client_keys(unsigned security_bits, RandomSource& rng)
{
    ClientKeys keys;
    keys.signing = generate_signing_key(rng);
    keys.chf = chf::generate_parameters(security_bits, rng);
    return keys;
}

AccountTx make_account_tx(const ClientKeys& keys, std::uint64_t fee, Bytes data, RandomSource& rng)
{
    AccountTx tx;
    tx.issuer = keys.address();
    tx.public_key = keys.signing.public_key;
    tx.fee = fee;
    tx.parameters = chf::sanitize(keys.chf);
    tx.check_string = chf::random_check_string(keys.chf, rng);
    tx.data = std::move(data);
    return sign_typed(std::move(tx), keys.signing.secret_key, keys.chf);
}

FundsTx make_funds_tx(const ClientKeys& keys, const Address& to, std::uint64_t amount, std::uint64_t fee,
                      std::uint32_t tx_cnt, Bytes data, RandomSource& rng)
{
    FundsTx tx;
    tx.amount = amount;
    tx.fee = fee;
    tx.tx_cnt = tx_cnt;
    tx.from = keys.address();
    tx.to = to;
    tx.data = std::move(data);
    tx.check_string = chf::random_check_string(keys.chf, rng);
    return sign_typed(std::move(tx), keys.signing.secret_key, keys.chf);
}

DataTx make_data_tx(const ClientKeys& keys, const Address& to, std::uint64_t fee, std::uint32_t tx_cnt, Bytes data,
                    RandomSource& rng)
{
    DataTx tx;
    tx.fee = fee;
    tx.tx_cnt = tx_cnt;
    tx.from = keys.address();
    tx.to = to;
    tx.data = std::move(data);
    tx.check_string = chf::random_check_string(keys.chf, rng);
    return sign_typed(std::move(tx), keys.signing.secret_key, keys.chf);
}

UpdateTx make_update(const Transaction& original, Bytes new_data, Bytes reason, std::uint64_t fee,
                     const ClientKeys& client, RandomSource& rng)
{
    if (!client.chf.has_trapdoor()) throw chf::MissingTrapdoor("client parameters carry no trapdoor key");
    if (!is_data_bearing(original)) throw TransactionError("target transaction has no Data field");
    if (owner_of(original) != client.address()) throw TransactionError("target transaction belongs to another account");

    const Digest old_message = tx_message(original);
    const auto& old_check = check_string_of(original);
    const Digest new_message = tx_message(with_data(original, new_data, old_check));

    UpdateTx u;
    u.tx_to_update_hash = chf::chameleon_hash(client.chf, old_check, old_message.view());
    u.tx_to_update_check_string = chf::find_collision(client.chf, old_message.view(), old_check, new_message.view(), rng);
    u.tx_to_update_data = std::move(new_data);
    u.issuer = client.address();
    u.fee = fee;
    u.reason = std::move(reason);
    u.check_string = chf::random_check_string(client.chf, rng);
    return sign_typed(std::move(u), client.signing.secret_key, client.chf);
}

Bytes encode_account(const Account& account)
{
    ByteWriter w;
    put_digest(w, account.address);
    put_bytes(w, account.signing_public_key);
    put_u64(w, account.balance);
    put_u32(w, account.tx_cnt);
    put_params(w, account.chf_parameters);
    return w.take();
}

Account decode_account(ByteView bytes)
{
    ByteReader r(bytes);
    Account a;
    a.address = get_digest(r);
    a.signing_public_key = r.prefixed();
    a.balance = get_u64(r);
    a.tx_cnt = get_u32(r);
    a.chf_parameters = get_params(r);
    r.expect_done();
    return a;
}

Bytes encode_client_keys(const ClientKeys& keys)
{
    if (!keys.chf.tk) throw TransactionError("client keys must include the trapdoor");
    ByteWriter w;
    put_bytes(w, keys.signing.secret_key);
    put_params(w, keys.chf);
    put_bytes(w, chf::encode_scalar(*keys.chf.tk));
    return w.take();
}

ClientKeys decode_client_keys(ByteView bytes)
{
    ByteReader r(bytes);
    ClientKeys keys;
    keys.signing.secret_key = r.prefixed();
    keys.signing.public_key = signing_public_key(keys.signing.secret_key);
    keys.chf = get_params(r);
    keys.chf.tk = chf::decode_scalar(r.prefixed());
    r.expect_done();
    return keys;
}

} // namespace redact
