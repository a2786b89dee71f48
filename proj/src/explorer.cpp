// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#include "redact/explorer.hpp"

namespace redact {

namespace {

bool printable_utf8(ByteView b)
{
    std::size_t i = 0;
    while (i < b.size()) {
        const std::uint8_t c = b[i];
        std::size_t extra = 0;
        if (c < 0x80) {
            if (c < 0x20 && c != '\n' && c != '\t') return false;
            if (c == 0x7f) return false;
        } else if ((c & 0xe0) == 0xc0 && c >= 0xc2) {
            extra = 1;
        } else if ((c & 0xf0) == 0xe0) {
            extra = 2;
        } else if ((c & 0xf8) == 0xf0 && c <= 0xf4) {
            extra = 3;
        } else {
            return false;
        }
        if (extra > 0 && i + extra >= b.size()) return false;
        for (std::size_t k = 1; k <= extra; ++k) {
            if ((b[i + k] & 0xc0) != 0x80) return false;
        }
        i += extra + 1;
    }
    return true;
}

void put_bytes(Json& j, const char* key, const Bytes& b, bool with_text)
{
    j[key] = to_hex(b);
    if (with_text && printable_utf8(b)) j[std::string(key) + "_text"] = to_string(b);
}

std::string scalar_hex(const chf::BigUint& v)
{
    return to_hex(chf::encode_scalar(v));
}

Json check_string_json(const chf::CheckString& c)
{
    return Json{{"r", scalar_hex(c.r)}, {"s", scalar_hex(c.s)}};
}

Json digests_json(const std::vector<Digest>& ds)
{
    Json out = Json::array();
    for (const auto& d : ds) out.push_back(d.hex());
    return out;
}

Json addresses_json(const std::vector<Address>& as)
{
    return digests_json(as);
}

Json params_json(const chf::ChameleonParameters& p)
{
    // tk is never rendered
    return Json{{"g", scalar_hex(p.g)}, {"p", scalar_hex(p.p)}, {"q", scalar_hex(p.q)}, {"hk", scalar_hex(p.hk)}};
}

// Reading side: every accessor throws DecodeError with the field name.
const Json& field(const Json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key)) throw DecodeError(std::string("explorer record lacks '") + key + "'");
    return j.at(key);
}

std::string str(const Json& j, const char* key)
{
    const Json& v = field(j, key);
    if (!v.is_string()) throw DecodeError(std::string("'") + key + "' is not a string");
    return v.get<std::string>();
}

Bytes bytes(const Json& j, const char* key)
{
    return from_hex(str(j, key));
}

Digest digest(const Json& j, const char* key)
{
    return Digest::from_hex(str(j, key));
}

std::uint64_t u64(const Json& j, const char* key)
{
    const Json& v = field(j, key);
    if (!v.is_number_unsigned()) throw DecodeError(std::string("'") + key + "' is not an unsigned number");
    return v.get<std::uint64_t>();
}

chf::BigUint scalar(const Json& j, const char* key)
{
    return chf::decode_scalar(bytes(j, key));
}

chf::CheckString check_string(const Json& j, const char* key)
{
    const Json& c = field(j, key);
    return {scalar(c, "r"), scalar(c, "s")};
}

std::vector<Digest> digest_list(const Json& j, const char* key)
{
    const Json& v = field(j, key);
    if (!v.is_array()) throw DecodeError(std::string("'") + key + "' is not a list");
    std::vector<Digest> out;
    for (const auto& e : v) {
        if (!e.is_string()) throw DecodeError(std::string("'") + key + "' holds a non-string");
        out.push_back(Digest::from_hex(e.get<std::string>()));
    }
    return out;
}

} // namespace

Json tx_to_json(const Transaction& tx, const std::optional<Digest>& d)
{
    Json j;
    j["type"] = std::string(tx_type_name(type_of(tx)));
    if (d) j["digest"] = d->hex();
    std::visit(
        [&](const auto& t) {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, AccountTx>) {
                j["issuer"] = t.issuer.hex();
                j["public_key"] = to_hex(t.public_key);
                j["fee"] = t.fee;
                j["parameters"] = params_json(t.parameters);
                j["check_string"] = check_string_json(t.check_string);
                put_bytes(j, "data", t.data, true);
                j["signature"] = to_hex(t.signature);
            } else if constexpr (std::is_same_v<T, FundsTx>) {
                j["amount"] = t.amount;
                j["fee"] = t.fee;
                j["tx_cnt"] = t.tx_cnt;
                j["from"] = t.from.hex();
                j["to"] = t.to.hex();
                put_bytes(j, "data", t.data, true);
                j["check_string"] = check_string_json(t.check_string);
                j["signature"] = to_hex(t.signature);
            } else if constexpr (std::is_same_v<T, DataTx>) {
                j["fee"] = t.fee;
                j["tx_cnt"] = t.tx_cnt;
                j["from"] = t.from.hex();
                j["to"] = t.to.hex();
                put_bytes(j, "data", t.data, true);
                j["check_string"] = check_string_json(t.check_string);
                j["signature"] = to_hex(t.signature);
            } else if constexpr (std::is_same_v<T, AggTx>) {
                j["kind"] = t.kind == AggTx::Kind::Funds ? "funds" : "data";
                j["from"] = addresses_json(t.from);
                j["to"] = addresses_json(t.to);
                j["total_amount"] = t.total_amount;
                put_bytes(j, "shared_data", t.shared_data, true);
                j["aggregated_hashes"] = digests_json(t.aggregated_hashes);
            } else {
                j["target_hash"] = t.tx_to_update_hash.hex();
                j["target_check_string"] = check_string_json(t.tx_to_update_check_string);
                put_bytes(j, "new_data", t.tx_to_update_data, true);
                j["issuer"] = t.issuer.hex();
                j["fee"] = t.fee;
                j["check_string"] = check_string_json(t.check_string);
                put_bytes(j, "data", t.data, true);
                put_bytes(j, "reason", t.reason, true);
                j["signature"] = to_hex(t.signature);
            }
        },
        tx);
    return j;
}

Transaction tx_from_json(const Json& j)
{
    const std::string type = str(j, "type");
    if (type == "account") {
        AccountTx t;
        t.issuer = digest(j, "issuer");
        t.public_key = bytes(j, "public_key");
        t.fee = u64(j, "fee");
        const Json& p = field(j, "parameters");
        t.parameters = {scalar(p, "g"), scalar(p, "p"), scalar(p, "q"), scalar(p, "hk"), std::nullopt};
        t.check_string = check_string(j, "check_string");
        t.data = bytes(j, "data");
        t.signature = bytes(j, "signature");
        return t;
    }
    if (type == "funds") {
        FundsTx t;
        t.amount = u64(j, "amount");
        t.fee = u64(j, "fee");
        t.tx_cnt = static_cast<std::uint32_t>(u64(j, "tx_cnt"));
        t.from = digest(j, "from");
        t.to = digest(j, "to");
        t.data = bytes(j, "data");
        t.check_string = check_string(j, "check_string");
        t.signature = bytes(j, "signature");
        return t;
    }
    if (type == "data") {
        DataTx t;
        t.fee = u64(j, "fee");
        t.tx_cnt = static_cast<std::uint32_t>(u64(j, "tx_cnt"));
        t.from = digest(j, "from");
        t.to = digest(j, "to");
        t.data = bytes(j, "data");
        t.check_string = check_string(j, "check_string");
        t.signature = bytes(j, "signature");
        return t;
    }
    if (type == "agg") {
        AggTx t;
        const std::string kind = str(j, "kind");
        if (kind != "funds" && kind != "data") throw DecodeError("unknown aggregation kind '" + kind + "'");
        t.kind = kind == "funds" ? AggTx::Kind::Funds : AggTx::Kind::Data;
        t.from = digest_list(j, "from");
        t.to = digest_list(j, "to");
        t.total_amount = u64(j, "total_amount");
        t.shared_data = bytes(j, "shared_data");
        t.aggregated_hashes = digest_list(j, "aggregated_hashes");
        return t;
    }
    if (type == "update") {
        UpdateTx t;
        t.tx_to_update_hash = digest(j, "target_hash");
        t.tx_to_update_check_string = check_string(j, "target_check_string");
        t.tx_to_update_data = bytes(j, "new_data");
        t.issuer = digest(j, "issuer");
        t.fee = u64(j, "fee");
        t.check_string = check_string(j, "check_string");
        t.data = bytes(j, "data");
        t.reason = bytes(j, "reason");
        t.signature = bytes(j, "signature");
        return t;
    }
    throw DecodeError("unknown transaction type '" + type + "'");
}

Json block_to_json(const Block& b)
{
    Json j;
    j["height"] = b.height;
    j["hash"] = block_hash(b).hex();
    j["prev_hash"] = b.prev_hash.hex();
    j["fallback_prev"] = b.fallback_prev.hex();
    j["merkle_root"] = b.merkle_root.hex();
    j["timestamp"] = b.timestamp;
    j["difficulty"] = b.difficulty;
    j["nonce"] = b.nonce;
    j["nr_update_tx"] = b.nr_update_tx;
    j["account_tx_list"] = digests_json(b.account_tx_list);
    j["funds_tx_list"] = digests_json(b.funds_tx_list);
    j["data_tx_list"] = digests_json(b.data_tx_list);
    j["agg_tx_list"] = digests_json(b.agg_tx_list);
    j["update_tx_list"] = digests_json(b.update_tx_list);
    return j;
}

Json account_to_json(const Account& a)
{
    return Json{{"address", a.address.hex()},
                {"public_key", to_hex(a.signing_public_key)},
                {"balance", a.balance},
                {"tx_cnt", a.tx_cnt},
                {"parameters", params_json(a.chf_parameters)}};
}

Json decision_to_json(const Decision& d)
{
    return Json{{"round", d.round}, {"digest", d.digest.hex()}, {"step", d.step}, {"verdict", d.verdict}};
}

} // namespace redact
