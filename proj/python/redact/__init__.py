"""Python bindings for the redact ledger, node and simulator."""

import json as _json

from ._core import (
    ChameleonParameters,
    ClientKeys,
    DecodeError,
    InvalidCheckString,
    ScenarioError,
    SeededRandom,
    Transaction,
    TransactionError,
    chameleon_hash,
    find_collision,
    generate_client_keys,
    generate_parameters,
    inner_hash,
    make_account_tx,
    make_data_tx,
    make_funds_tx,
    make_update,
    parameters_from_trapdoor,
    random_check_string,
)
from ._core import Node as _Node
from ._core import run_scenario as _run_scenario

__all__ = [
    "ChameleonParameters",
    "ClientKeys",
    "DecodeError",
    "InvalidCheckString",
    "Node",
    "ScenarioError",
    "SeededRandom",
    "Transaction",
    "TransactionError",
    "chameleon_hash",
    "find_collision",
    "generate_client_keys",
    "generate_parameters",
    "inner_hash",
    "make_account_tx",
    "make_data_tx",
    "make_funds_tx",
    "make_update",
    "parameters_from_trapdoor",
    "random_check_string",
    "run_scenario",
]


class Node(_Node):
    """Node whose explorer methods return parsed JSON."""

    def mine(self, timestamp):
        return _json.loads(super().mine(timestamp))

    def explore(self, digest):
        record = super().explore(digest)
        return None if record is None else _json.loads(record)

    def block(self, height):
        return _json.loads(super().block(height))

    def validate(self):
        return _json.loads(super().validate())


def run_scenario(script, seed=None):
    """Returns (report_text, converged)."""
    return _run_scenario(script, seed)
