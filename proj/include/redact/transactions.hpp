// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#ifndef REDACT_TRANSACTIONS_HPP
#define REDACT_TRANSACTIONS_HPP

#include "redact/bytes.hpp"
#include "redact/chameleon_hash.hpp"
#include "redact/crypto.hpp"

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace redact {

enum class TxType : std::uint8_t {
    Account = 0x01,
    Funds = 0x02,
    Data = 0x03,
    Agg = 0x04,
    Update = 0x05,
};

std::string_view tx_type_name(TxType type);

/// Self-issued account creation. Carries the owner's sanitized CHF parameters
/// so that every miner can recompute hashes of the owner's transactions.
struct AccountTx {
    static constexpr TxType type = TxType::Account;
    Address issuer;
    Bytes public_key;
    std::uint64_t fee = 0;
    chf::ChameleonParameters parameters;
    chf::CheckString check_string;
    Bytes data;
    Bytes signature;

    bool operator==(const AccountTx&) const = default;
};

struct FundsTx {
    static constexpr TxType type = TxType::Funds;
    std::uint64_t amount = 0;
    std::uint64_t fee = 0;
    std::uint32_t tx_cnt = 0;
    Address from;
    Address to;
    Bytes data;
    chf::CheckString check_string;
    Bytes signature;

    bool operator==(const FundsTx&) const = default;
};

struct DataTx {
    static constexpr TxType type = TxType::Data;
    std::uint64_t fee = 0;
    std::uint32_t tx_cnt = 0;
    Address from;
    Address to;
    Bytes data;
    chf::CheckString check_string;
    Bytes signature;

    bool operator==(const DataTx&) const = default;
};

/// Bundle of funds or data transactions sharing a sender (or a receiver).
/// Built by miners: it carries no check string and no signature, and its
/// digest is the plain inner hash of its fields.
struct AggTx {
    static constexpr TxType type = TxType::Agg;
    enum class Kind : std::uint8_t { Funds = 0, Data = 1 };

    Kind kind = Kind::Funds;
    std::vector<Address> from;
    std::vector<Address> to;
    std::uint64_t total_amount = 0;  // Kind::Funds
    Bytes shared_data;               // Kind::Data
    std::vector<Digest> aggregated_hashes;

    bool operator==(const AggTx&) const = default;
};

/// Carrier of a Data-field modification. The tx_to_update_* payload is fixed
/// once mined; only this transaction's own `data` is itself updatable.
struct UpdateTx {
    static constexpr TxType type = TxType::Update;
    Digest tx_to_update_hash;
    chf::CheckString tx_to_update_check_string;
    Bytes tx_to_update_data;
    Address issuer;
    std::uint64_t fee = 0;
    chf::CheckString check_string;
    Bytes data;
    Bytes reason;
    Bytes signature;

    bool operator==(const UpdateTx&) const = default;
};

using Transaction = std::variant<AccountTx, FundsTx, DataTx, AggTx, UpdateTx>;

class TransactionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Account {
    Address address;
    Bytes signing_public_key;
    std::uint64_t balance = 0;
    std::uint32_t tx_cnt = 0;
    chf::ChameleonParameters chf_parameters;  // always sanitized

    bool operator==(const Account&) const = default;
};

Bytes encode_account(const Account& account);
Account decode_account(ByteView bytes);

/// Secret material held by a client: signing key and CHF parameters with tk.
struct ClientKeys {
    SigningKeyPair signing;
    chf::ChameleonParameters chf;

    Address address() const { return address_of(signing.public_key); }
};

ClientKeys generate_client_keys(unsigned security_bits, RandomSource& rng);

/// Resolves the on-chain CHF parameters of an account.
class AccountDirectory {
public:
    virtual ~AccountDirectory() = default;
    virtual std::optional<chf::ChameleonParameters> parameters_of(const Address& address) const = 0;
};

TxType type_of(const Transaction& tx);
bool is_data_bearing(const Transaction& tx);
/// Account whose keys hash and sign the transaction. Empty for AggTx.
std::optional<Address> owner_of(const Transaction& tx);
/// Throws TransactionError for AggTx.
const Bytes& data_of(const Transaction& tx);
const chf::CheckString& check_string_of(const Transaction& tx);
const Bytes& signature_of(const Transaction& tx);

/// Copy with the Data field and check string replaced. Every other field,
/// including the signature, is kept.
Transaction with_data(const Transaction& tx, Bytes data, chf::CheckString check_string);

/// Canonical serialization of every field except check_string and signature:
/// the header byte, then each field in declaration order as a 4-byte
/// big-endian length and its bytes (integers fixed-width big-endian).
Bytes canonical_fields(const Transaction& tx);

/// inner_hash(canonical_fields(tx)): the chameleon-hash input.
Digest tx_message(const Transaction& tx);

/// Chameleon hash of the transaction under its owner's parameters. For an
/// AggTx the parameters are ignored and the plain inner hash is returned.
Digest tx_hash(const Transaction& tx, const chf::ChameleonParameters& issuer_params);

/// Parameters used to hash `tx`: embedded for AccountTx, looked up otherwise.
std::optional<chf::ChameleonParameters> hashing_parameters(const Transaction& tx, const AccountDirectory& accounts);
std::optional<Digest> tx_hash(const Transaction& tx, const AccountDirectory& accounts);

/// Wire format: canonical_fields followed by the check string and signature,
/// both length-prefixed. AggTx has neither trailer.
Bytes encode_tx(const Transaction& tx);
Transaction decode_tx(ByteView bytes);

/// Signs tx_hash(tx). Throws KeyError on a malformed key, TransactionError for AggTx.
Transaction sign_tx(const Transaction& tx, ByteView signing_secret_key, const chf::ChameleonParameters& issuer_params);
bool verify_signature(const Transaction& tx, ByteView signing_public_key, const chf::ChameleonParameters& issuer_params);

AccountTx make_account_tx(const ClientKeys& keys, std::uint64_t fee, Bytes data, RandomSource& rng);
FundsTx make_funds_tx(const ClientKeys& keys, const Address& to, std::uint64_t amount, std::uint64_t fee,
                      std::uint32_t tx_cnt, Bytes data, RandomSource& rng);
DataTx make_data_tx(const ClientKeys& keys, const Address& to, std::uint64_t fee, std::uint32_t tx_cnt, Bytes data,
                    RandomSource& rng);

/// Client-side modification: computes the colliding check string for
/// `original` with its Data replaced by `new_data` and wraps it in a signed
/// UpdateTx. Throws chf::MissingTrapdoor without tk and TransactionError when
/// the original is not data-bearing or not owned by `client`.
UpdateTx make_update(const Transaction& original, Bytes new_data, Bytes reason, std::uint64_t fee,
                     const ClientKeys& client, RandomSource& rng);

/// Client secret file contents (signing secret, CHF parameters including tk).
Bytes encode_client_keys(const ClientKeys& keys);
ClientKeys decode_client_keys(ByteView bytes);

} // namespace redact

#endif // REDACT_TRANSACTIONS_HPP
