"""Python access to the sinrnet simulator.

Every function returns plain Python data: networks, selectors and backbones
are dicts in the same JSON layout the command-line tool reads and writes.
"""

import json

from . import _core
from ._core import FormatError, ProtocolError, metrics_columns, range_of

__all__ = [
    "FormatError",
    "ProtocolError",
    "build_selector",
    "export_dot",
    "gen_lower_bound",
    "gen_network",
    "metrics_columns",
    "range_of",
    "run_backbone",
    "run_leader",
    "run_multibroadcast",
    "run_scenario",
    "verify_selector",
]


def _text(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def gen_network(**kwargs):
    return json.loads(_core.gen_network(**kwargs))


def gen_lower_bound(**kwargs):
    return json.loads(_core.gen_lower_bound(**kwargs))


def build_selector(**kwargs):
    return json.loads(_core.build_selector(**kwargs))


def verify_selector(selector, network, active=None):
    return json.loads(_core.verify_selector(_text(selector), _text(network), active))


def run_backbone(network, selector, dilution_prime=0):
    return json.loads(_core.run_backbone(_text(network), _text(selector), dilution_prime))


def run_leader(backbone, mode="eager"):
    """Returns (result, trace) with one trace entry per phase."""
    result, trace = _core.run_leader(_text(backbone), mode)
    return json.loads(result), [json.loads(line) for line in trace.splitlines() if line]


def run_multibroadcast(backbone, payloads, mode="eager", rule="min_tag"):
    """payloads maps station id to its number of rumors."""
    return json.loads(_core.run_multibroadcast(_text(backbone), dict(payloads), mode, rule))


def run_scenario(config, base_dir=".", threads=0):
    """Runs a scenario config (dict or JSON text); returns one dict per run."""
    import csv
    import io

    rows = list(csv.DictReader(io.StringIO(_core.run_scenario(_text(config), base_dir, threads))))
    for row in rows:
        for key, value in row.items():
            if key == "label":
                continue
            row[key] = bool(int(value)) if key == "ok" else int(value)
    return rows


def export_dot(network_or_backbone):
    return _core.export_dot(_text(network_or_backbone))
