"""JSON documents for networks, requests, placements, results, certificates.

Schemas:

* network — ``{"nodes": ["s", ...], "edges": [{"tail": "s", "head":
  "v11", "capacity": 1.0 | "inf"}]}``.  Node references are labels;
  bare integer indices are also accepted on input.
* request — ``{"source": "s", "dest": "d", "sizes": [1, 1, 1],
  "placements": [["v11", "v12"], ...]}`` where ``placements`` lists the
  candidate sets per stage.
* placement — the bare ``placements`` array.
* solve result — ``{"algorithm", "delay": "p/q", "delay_decimal",
  "placement", "per_round", "stats"}``.
* certificate — ``{"achieved", "rounds": [{"h", "achieved",
  "attempts", "target_ranks", ...}]}``.

Delays serialize as exact fraction strings ("p/q" or "infeasible") with
float convenience fields alongside.  Capacities and sizes emit as plain
numbers; any micro-unit value whose shortest float form would not parse
back exactly falls back to a fixed six-decimal string, so emission is
lossless.  ``load_json`` parses JSON reals as Decimal, which ``to_micro``
converts without binary-float rounding.
"""

from __future__ import annotations

import json
from decimal import Decimal
from pathlib import Path
from typing import Any, Optional, Union

from .chain import ChainRequest, Delay, Placement
from .coding import PlacementCertificate
from .netgraph import MICRO, Capacity, Network, NodeSet, to_micro
from .solvers import SolveResult


def load_json(path: Union[str, Path]) -> Any:
    """Read a JSON document with reals parsed exactly as Decimal."""
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh, parse_float=Decimal)


def dump_json(doc: Any, path: Union[str, Path]) -> None:
    """Write a JSON document with a trailing newline."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _micro_to_json(micro: int) -> Union[int, float, str]:
    """Lossless plain-number form of a micro-unit value.

    Whole units emit as ints and everything else as the shortest float,
    unless that float would not round-trip through to_micro — then a
    fixed six-decimal string is emitted instead.
    """
    if micro % MICRO == 0:
        return micro // MICRO
    value = micro / MICRO
    if to_micro(repr(value)) == micro:
        return value
    return f"{micro // MICRO}.{micro % MICRO:06d}"


def _capacity_to_json(cap: Capacity) -> Union[int, float, str]:
    if cap.is_infinite:
        return "inf"
    return _micro_to_json(cap.micro)


def _capacity_from_json(value: Any) -> Capacity:
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity"):
        return Capacity.INFINITE
    try:
        return Capacity(to_micro(value))
    except (TypeError, ValueError) as exc:
        raise ValueError(f"bad capacity {value!r}: {exc}") from None


def _delay_to_json(delay: Delay) -> str:
    return str(delay)


def _delay_to_float(delay: Delay) -> Optional[float]:
    return None if delay.is_infeasible else float(delay.fraction)


def network_to_json(net: Network) -> dict:
    labels = [net.label_of(i) for i in range(net.node_count)]
    return {
        "nodes": labels,
        "edges": [
            {
                "tail": labels[e.tail],
                "head": labels[e.head],
                "capacity": _capacity_to_json(e.capacity),
            }
            for e in net.edges
        ],
    }


def network_from_json(doc: Any) -> Network:
    if not isinstance(doc, dict) or "nodes" not in doc or "edges" not in doc:
        raise ValueError('network document must have "nodes" and "edges"')
    labels = doc["nodes"]
    if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
        raise ValueError('"nodes" must be a list of label strings')
    index = {label: i for i, label in enumerate(labels)}
    if len(index) != len(labels):
        raise ValueError("duplicate node labels")

    def ref(value: Any, where: str) -> int:
        if isinstance(value, bool):
            raise ValueError(f"bad node reference {value!r} in {where}")
        if isinstance(value, str):
            if value not in index:
                raise ValueError(f"unknown node {value!r} in {where}")
            return index[value]
        if isinstance(value, int):
            if not 0 <= value < len(labels):
                raise ValueError(f"node index {value} out of range in {where}")
            return value
        raise ValueError(f"bad node reference {value!r} in {where}")

    edges = []
    for pos, entry in enumerate(doc["edges"]):
        if not isinstance(entry, dict):
            raise ValueError(f"edge #{pos} must be an object")
        try:
            tail = ref(entry["tail"], f"edge #{pos}")
            head = ref(entry["head"], f"edge #{pos}")
            cap = _capacity_from_json(entry["capacity"])
        except KeyError as exc:
            raise ValueError(f"edge #{pos} is missing {exc}") from None
        edges.append((tail, head, cap))
    return Network(len(labels), edges, node_labels=list(labels))


def _node_ref(value: Any, net: Network, where: str) -> int:
    if isinstance(value, bool):
        raise ValueError(f"bad node reference {value!r} in {where}")
    if isinstance(value, str):
        try:
            return net.index_of(value)
        except KeyError:
            raise ValueError(f"unknown node {value!r} in {where}") from None
    if isinstance(value, int):
        if not 0 <= value < net.node_count:
            raise ValueError(f"node index {value} out of range in {where}")
        return value
    raise ValueError(f"bad node reference {value!r} in {where}")


def _node_list(values: Any, net: Network, where: str) -> NodeSet:
    if not isinstance(values, list):
        raise ValueError(f"{where} must be a list of nodes")
    return NodeSet.from_iterable(_node_ref(v, net, where) for v in values)


def request_to_json(req: ChainRequest, net: Network) -> dict:
    return {
        "source": net.label_of(req.source),
        "dest": net.label_of(req.dest),
        "sizes": [_micro_to_json(m) for m in req.sizes_micro],
        "placements": [
            [net.label_of(v) for v in cand.nodes()] for cand in req.placements
        ],
    }


def request_from_json(doc: Any, net: Network) -> ChainRequest:
    if not isinstance(doc, dict):
        raise ValueError("request document must be an object")
    missing = [k for k in ("source", "dest", "sizes", "placements") if k not in doc]
    if missing:
        raise ValueError(f"request document is missing {missing}")
    source = _node_ref(doc["source"], net, "source")
    dest = _node_ref(doc["dest"], net, "dest")
    sizes = doc["sizes"]
    if not isinstance(sizes, list) or not sizes:
        raise ValueError('"sizes" must be a nonempty list')
    placements = doc["placements"]
    if not isinstance(placements, list):
        raise ValueError('"placements" must be a list')
    cands = [
        _node_list(stage, net, f"placements[{i}]") for i, stage in enumerate(placements)
    ]
    return ChainRequest(source, dest, sizes, cands)


def placement_to_json(placement: Placement, net: Network) -> list:
    return [[net.label_of(v) for v in s.nodes()] for s in placement.sets]


def placement_from_json(doc: Any, net: Network) -> Placement:
    if not isinstance(doc, list):
        raise ValueError("placement document must be an array of stage arrays")
    return Placement(
        [_node_list(stage, net, f"stage #{i}") for i, stage in enumerate(doc)]
    )


def solve_result_to_json(result: SolveResult, net: Network) -> dict:
    doc = {
        "algorithm": result.algorithm,
        "delay": _delay_to_json(result.delay),
        "delay_decimal": _delay_to_float(result.delay),
        "placement": placement_to_json(result.placement, net),
        "per_round": [_delay_to_json(d) for d in result.per_round],
        "stats": {
            "mincut_evals": result.stats.mincut_evals,
            "flow_calls": result.stats.flow_calls,
            "dp_states": result.stats.dp_states,
            "greedy_iterations": result.stats.greedy_iterations,
        },
    }
    if result.note:
        doc["note"] = result.note
    return doc


def certificate_to_json(cert: PlacementCertificate, net: Network) -> dict:
    rounds = []
    for rc in cert.rounds:
        entry = {
            "h": rc.h,
            "achieved": rc.achieved,
            "attempts": rc.attempts,
            "target_ranks": {
                net.label_of(v): rank for v, rank in sorted(rc.target_ranks.items())
            },
            "rate": None
            if rc.rate is None
            else f"{rc.rate.numerator}/{rc.rate.denominator}",
            "block_length": rc.block_length,
            "applicable": rc.applicable,
        }
        if rc.note:
            entry["note"] = rc.note
        rounds.append(entry)
    return {"achieved": cert.achieved, "rounds": rounds}
