// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#include "redact/explorer.hpp"
#include "redact/scenario.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace redact;

namespace {

// Big integers cross the boundary as Python ints via their decimal form.
py::int_ to_py(const chf::BigUint& v)
{
    return py::int_(py::str(v.get_str()));
}

chf::BigUint from_py(const py::int_& v)
{
    const auto text = py::cast<std::string>(py::str(py::handle(v)));
    if (text.starts_with('-')) throw py::value_error("negative integer");
    return chf::BigUint(text);
}

Bytes to_bytes_arg(const py::bytes& b)
{
    const std::string s = b;
    return Bytes(s.begin(), s.end());
}

py::bytes to_py_bytes(ByteView b)
{
    return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

Digest digest_arg(const std::string& hex)
{
    return Digest::from_hex(hex);
}

py::tuple check_to_py(const chf::CheckString& c)
{
    return py::make_tuple(to_py(c.r), to_py(c.s));
}

chf::CheckString check_from_py(const py::tuple& t)
{
    if (t.size() != 2) throw py::value_error("check string is an (r, s) pair");
    return {from_py(t[0]), from_py(t[1])};
}

// Wraps the variant so Python sees one opaque type.
struct PyTx {
    Transaction tx;
};

// In-memory or file-backed node.
class PyNode {
public:
    PyNode(std::optional<std::string> path, unsigned difficulty, bool public_mode, const std::string& consensus)
        : store_(path ? std::make_unique<Store>(*path) : std::make_unique<Store>()),
          miner_(*store_, make_config(difficulty, public_mode, consensus))
    {
    }

    std::optional<std::string> submit(const PyTx& t)
    {
        auto d = miner_.submit(t.tx);
        if (!d) return std::nullopt;
        return d->hex();
    }

    std::string mine(std::uint64_t timestamp)
    {
        const auto r = miner_.mine(timestamp);
        Json out{{"block", block_to_json(r.block)}, {"decisions", Json::array()}};
        for (const auto& d : r.decisions) out["decisions"].push_back(decision_to_json(d));
        return out.dump();
    }

    std::optional<PyTx> find_tx(const std::string& hex) const
    {
        auto tx = miner_.state().find_tx(digest_arg(hex));
        if (!tx) return std::nullopt;
        return PyTx{*tx};
    }

    std::optional<std::string> explore(const std::string& selector) const
    {
        const auto& state = miner_.state();
        const Digest d = digest_arg(selector);
        if (auto tx = state.find_tx(d)) return tx_to_json(*tx, d).dump();
        if (auto a = state.account(d)) return account_to_json(*a).dump();
        return std::nullopt;
    }

    std::string block(std::uint64_t height) const
    {
        if (height > miner_.state().height()) throw py::index_error("no block at that height");
        return block_to_json(miner_.state().block_at(height)).dump();
    }

    std::string validate() const
    {
        const auto& state = miner_.state();
        const auto v = validate_chain(state.chain(), state);
        Json j{{"ok", v.ok()}, {"height", state.height()}, {"fallback_links", v.fallback_links}};
        if (v.violation) {
            j["violation"] = {{"height", v.violation->height},
                              {"check", std::string(check_name(v.violation->check))},
                              {"detail", v.violation->detail}};
        }
        return j.dump();
    }

    std::uint64_t height() const { return miner_.state().height(); }
    std::string tip() const { return miner_.state().tip_hash().hex(); }
    std::string dump() const { return store_->dump(); }
    std::string dump_digest() const { return store_->dump_digest().hex(); }
    std::size_t pool_size() { return miner_.pool().size(); }
    void close() { store_->close(); }

private:
    static NodeConfig make_config(unsigned difficulty, bool public_mode, const std::string& consensus)
    {
        NodeConfig c;
        c.difficulty = difficulty;
        c.public_mode = public_mode;
        c.consensus = parse_consensus(consensus);
        return c;
    }

    std::unique_ptr<Store> store_;
    Miner miner_;
};

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Native core of the redact package";

    py::register_exception<DecodeError>(m, "DecodeError", PyExc_ValueError);
    py::register_exception<TransactionError>(m, "TransactionError", PyExc_ValueError);
    py::register_exception<chf::InvalidCheckString>(m, "InvalidCheckString", PyExc_ValueError);
    py::register_exception<net::ScenarioError>(m, "ScenarioError", PyExc_ValueError);

    py::class_<SeededRandom>(m, "SeededRandom")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("next_u64", [](SeededRandom& r) { return r.next_u64(); });

    py::class_<chf::ChameleonParameters>(m, "ChameleonParameters")
        .def_property_readonly("g", [](const chf::ChameleonParameters& p) { return to_py(p.g); })
        .def_property_readonly("p", [](const chf::ChameleonParameters& p) { return to_py(p.p); })
        .def_property_readonly("q", [](const chf::ChameleonParameters& p) { return to_py(p.q); })
        .def_property_readonly("hk", [](const chf::ChameleonParameters& p) { return to_py(p.hk); })
        .def_property_readonly("has_trapdoor", &chf::ChameleonParameters::has_trapdoor)
        .def("sanitized", [](const chf::ChameleonParameters& p) { return chf::sanitize(p); });

    m.def("generate_parameters", [](unsigned bits, SeededRandom& rng) { return chf::generate_parameters(bits, rng); },
          py::arg("security_bits"), py::arg("rng"));
    m.def(
        "parameters_from_trapdoor",
        [](const py::int_& p, const py::int_& q, const py::int_& g, const py::int_& tk) {
            return chf::parameters_from_trapdoor(from_py(p), from_py(q), from_py(g), from_py(tk));
        },
        py::arg("p"), py::arg("q"), py::arg("g"), py::arg("tk"));
    m.def("random_check_string",
          [](const chf::ChameleonParameters& p, SeededRandom& rng) { return check_to_py(chf::random_check_string(p, rng)); });
    m.def(
        "chameleon_hash",
        [](const chf::ChameleonParameters& p, const py::tuple& check, const py::bytes& message) {
            return chf::chameleon_hash(p, check_from_py(check), to_bytes_arg(message)).hex();
        },
        py::arg("params"), py::arg("check"), py::arg("message"));
    m.def(
        "find_collision",
        [](const chf::ChameleonParameters& p, const py::bytes& old_message, const py::tuple& old_check,
           const py::bytes& new_message, SeededRandom& rng) {
            return check_to_py(chf::find_collision(p, to_bytes_arg(old_message), check_from_py(old_check),
                                                   to_bytes_arg(new_message), rng));
        },
        py::arg("params"), py::arg("old_message"), py::arg("old_check"), py::arg("new_message"), py::arg("rng"));
    m.def("inner_hash", [](const py::bytes& b) { return inner_hash(to_bytes_arg(b)).hex(); });

    py::class_<ClientKeys>(m, "ClientKeys")
        .def_property_readonly("address", [](const ClientKeys& k) { return k.address().hex(); })
        .def_property_readonly("parameters", [](const ClientKeys& k) { return k.chf; })
        .def("to_bytes", [](const ClientKeys& k) { return to_py_bytes(encode_client_keys(k)); })
        .def_static("from_bytes", [](const py::bytes& b) { return decode_client_keys(to_bytes_arg(b)); });
    m.def("generate_client_keys", [](unsigned bits, SeededRandom& rng) { return generate_client_keys(bits, rng); },
          py::arg("security_bits"), py::arg("rng"));

    py::class_<PyTx>(m, "Transaction")
        .def_property_readonly("type", [](const PyTx& t) { return std::string(tx_type_name(type_of(t.tx))); })
        .def("to_json", [](const PyTx& t) { return tx_to_json(t.tx).dump(); })
        .def_static("from_json", [](const std::string& s) { return PyTx{tx_from_json(Json::parse(s))}; })
        .def("to_bytes", [](const PyTx& t) { return to_py_bytes(encode_tx(t.tx)); })
        .def_static("from_bytes", [](const py::bytes& b) { return PyTx{decode_tx(to_bytes_arg(b))}; })
        .def("canonical_fields", [](const PyTx& t) { return to_py_bytes(canonical_fields(t.tx)); })
        .def("message", [](const PyTx& t) { return tx_message(t.tx).hex(); })
        .def("__eq__", [](const PyTx& a, const PyTx& b) { return a.tx == b.tx; });

    m.def(
        "make_account_tx",
        [](const ClientKeys& k, std::uint64_t fee, const py::bytes& data, SeededRandom& rng) {
            return PyTx{make_account_tx(k, fee, to_bytes_arg(data), rng)};
        },
        py::arg("keys"), py::arg("fee"), py::arg("data"), py::arg("rng"));
    m.def(
        "make_funds_tx",
        [](const ClientKeys& k, const std::string& to, std::uint64_t amount, std::uint64_t fee, std::uint32_t cnt,
           const py::bytes& data, SeededRandom& rng) {
            return PyTx{make_funds_tx(k, digest_arg(to), amount, fee, cnt, to_bytes_arg(data), rng)};
        },
        py::arg("keys"), py::arg("to"), py::arg("amount"), py::arg("fee"), py::arg("tx_cnt"), py::arg("data"),
        py::arg("rng"));
    m.def(
        "make_data_tx",
        [](const ClientKeys& k, const std::string& to, std::uint64_t fee, std::uint32_t cnt, const py::bytes& data,
           SeededRandom& rng) { return PyTx{make_data_tx(k, digest_arg(to), fee, cnt, to_bytes_arg(data), rng)}; },
        py::arg("keys"), py::arg("to"), py::arg("fee"), py::arg("tx_cnt"), py::arg("data"), py::arg("rng"));
    m.def(
        "make_update",
        [](const PyTx& original, const py::bytes& new_data, const py::bytes& reason, std::uint64_t fee,
           const ClientKeys& k, SeededRandom& rng) {
            return PyTx{make_update(original.tx, to_bytes_arg(new_data), to_bytes_arg(reason), fee, k, rng)};
        },
        py::arg("original"), py::arg("new_data"), py::arg("reason"), py::arg("fee"), py::arg("keys"), py::arg("rng"));

    py::class_<PyNode>(m, "Node")
        .def(py::init<std::optional<std::string>, unsigned, bool, const std::string&>(), py::arg("path") = py::none(),
             py::arg("difficulty") = 8, py::arg("public_mode") = false, py::arg("consensus") = "pow")
        .def("submit", &PyNode::submit)
        .def("mine", &PyNode::mine, py::arg("timestamp"))
        .def("find_tx", &PyNode::find_tx)
        .def("explore", &PyNode::explore)
        .def("block", &PyNode::block)
        .def("validate", &PyNode::validate)
        .def_property_readonly("height", &PyNode::height)
        .def_property_readonly("tip", &PyNode::tip)
        .def_property_readonly("pool_size", &PyNode::pool_size)
        .def("dump", &PyNode::dump)
        .def("dump_digest", &PyNode::dump_digest)
        .def("close", &PyNode::close);

    m.def(
        "run_scenario",
        [](const std::string& script, std::optional<std::uint64_t> seed) {
            auto run = net::run_scenario(script, seed);
            return py::make_tuple(run.report.text(), run.report.converged);
        },
        py::arg("script"), py::arg("seed") = py::none());
}
