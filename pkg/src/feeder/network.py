"""Network model for the feeder problems and the instance document schema.

An instance document is JSON with the fields::

    nodes          list of node ids (strings)
    interchange    id of the interchange node
    edges          list of {"from", "to", "rho", "time"}
    demand         {node: volume}            (missing nodes default to 0)
    supply         {node: volume}            (missing nodes default to 0)
    time_window    T, minutes
    value_of_time  alpha, money per minute
    cost_factor    b                         } exactly one of these two
    alt_transport  {node: {"eta", "zeta"}}   }
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Mapping

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra


class InstanceError(ValueError):
    """Raised for documents or networks that violate the model invariants."""


@dataclass(frozen=True)
class Edge:
    tail: str
    head: str
    rho: float
    time: float


@dataclass(frozen=True)
class Network:
    nodes: tuple[str, ...]
    interchange: str
    edges: tuple[Edge, ...]
    demand: Mapping[str, float] = field(default_factory=dict)
    supply: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "demand", {l: float(self.demand.get(l, 0.0)) for l in self.nodes})
        object.__setattr__(self, "supply", {l: float(self.supply.get(l, 0.0)) for l in self.nodes})
        self.validate()

    def validate(self) -> None:
        if len(set(self.nodes)) != len(self.nodes):
            raise InstanceError("duplicate node ids")
        if self.interchange not in self.nodes:
            raise InstanceError(f"interchange {self.interchange!r} is not a node")
        seen = set()
        known = set(self.nodes)
        for e in self.edges:
            if e.tail not in known or e.head not in known:
                raise InstanceError(f"edge {e.tail}->{e.head} references an unknown node")
            if e.tail == e.head:
                raise InstanceError(f"self-loop at {e.tail}")
            if (e.tail, e.head) in seen:
                raise InstanceError(f"parallel edge {e.tail}->{e.head}")
            seen.add((e.tail, e.head))
            if not (e.time > 0 and math.isfinite(e.time)):
                raise InstanceError(f"non-positive edge time on {e.tail}->{e.head}")
            if not (e.rho > 0 and math.isfinite(e.rho)):
                raise InstanceError(f"non-positive edge cost on {e.tail}->{e.head}")
        for name, values in (("demand", self.demand), ("supply", self.supply)):
            for l, v in values.items():
                if v < 0 or not math.isfinite(v):
                    raise InstanceError(f"{name} at {l} must be a finite nonnegative number")
        if self.demand[self.interchange] != 0:
            raise InstanceError("interchange demand must be zero")

    @cached_property
    def position(self) -> dict[str, int]:
        return {l: k for k, l in enumerate(self.nodes)}

    @cached_property
    def successors(self) -> dict[str, tuple[Edge, ...]]:
        out: dict[str, list[Edge]] = {l: [] for l in self.nodes}
        for e in self.edges:
            out[e.tail].append(e)
        pos = self.position
        return {l: tuple(sorted(es, key=lambda e: pos[e.head])) for l, es in out.items()}

    @cached_property
    def edge_map(self) -> dict[tuple[str, str], Edge]:
        return {(e.tail, e.head): e for e in self.edges}

    def _matrix(self, weight: str, reverse: bool = False) -> csr_matrix:
        pos = self.position
        n = len(self.nodes)
        rows = [pos[e.head if reverse else e.tail] for e in self.edges]
        cols = [pos[e.tail if reverse else e.head] for e in self.edges]
        data = [getattr(e, weight) for e in self.edges]
        return csr_matrix((data, (rows, cols)), shape=(n, n))

    @cached_property
    def cheapest_table(self) -> np.ndarray:
        return dijkstra(self._matrix("rho"), directed=True)

    @cached_property
    def fastest_to_interchange(self) -> dict[str, float]:
        """Minimum travel time from each node to the interchange."""
        d = dijkstra(self._matrix("time", reverse=True), directed=True,
                     indices=self.position[self.interchange])
        return {l: float(d[k]) for l, k in self.position.items()}

    @property
    def total_demand(self) -> float:
        return float(sum(self.demand.values()))


def cheapest_cost(net: Network, source: str, target: str) -> float:
    """Cheapest summed edge cost from ``source`` to ``target``; ``inf`` if unreachable."""
    pos = net.position
    return float(net.cheapest_table[pos[source], pos[target]])


def reverse(net: Network) -> Network:
    """Reverse every edge, keeping costs and times.

    Node data (demand, supply) is copied unchanged; callers decide what the
    mirrored problem should use.
    """
    return replace(net, edges=tuple(Edge(e.head, e.tail, e.rho, e.time) for e in net.edges))


def unreachable_nodes(net: Network, time_window: float | None = None) -> list[str]:
    """Nodes that cannot reach the interchange (within ``time_window`` if given)."""
    limit = math.inf if time_window is None else time_window
    fast = net.fastest_to_interchange
    return [l for l in net.nodes
            if l != net.interchange and (math.isinf(fast[l]) or fast[l] > limit + 1e-9)]


@dataclass(frozen=True)
class Instance:
    network: Network
    time_window: float
    value_of_time: float
    cost_factor: float | None = None
    alt_transport: Mapping[str, tuple[float, float]] | None = None

    def __post_init__(self) -> None:
        if not self.time_window > 0:
            raise InstanceError("time window must be positive")
        if self.value_of_time < 0:
            raise InstanceError("value of time must be nonnegative")
        if (self.cost_factor is None) == (self.alt_transport is None):
            raise InstanceError("exactly one of cost_factor and alt_transport is required")
        if self.cost_factor is not None and self.cost_factor < 0:
            raise InstanceError("cost factor must be nonnegative")

    def with_cost_factor(self, b: float) -> "Instance":
        return replace(self, cost_factor=float(b), alt_transport=None)

    def with_network(self, net: Network) -> "Instance":
        return replace(self, network=net)


def _number(doc: Mapping, key: str) -> float:
    try:
        v = doc[key]
    except KeyError:
        raise InstanceError(f"missing field {key!r}") from None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InstanceError(f"field {key!r} must be a number")
    return float(v)


def parse_instance(doc: Mapping) -> Instance:
    if not isinstance(doc, Mapping):
        raise InstanceError("instance document must be an object")
    try:
        nodes = [str(l) for l in doc["nodes"]]
        interchange = str(doc["interchange"])
        raw_edges = doc["edges"]
    except KeyError as exc:
        raise InstanceError(f"missing field {exc.args[0]!r}") from None
    edges = []
    for e in raw_edges:
        try:
            edges.append(Edge(str(e["from"]), str(e["to"]), float(e["rho"]), float(e["time"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise InstanceError(f"malformed edge {e!r}") from exc
    for key in ("demand", "supply"):
        for l in doc.get(key, {}) or {}:
            if str(l) not in nodes:
                raise InstanceError(f"{key} given for unknown node {l!r}")
    net = Network(
        nodes=tuple(nodes),
        interchange=interchange,
        edges=tuple(edges),
        demand={str(k): float(v) for k, v in (doc.get("demand") or {}).items()},
        supply={str(k): float(v) for k, v in (doc.get("supply") or {}).items()},
    )
    alt = None
    if "alt_transport" in doc and doc["alt_transport"] is not None:
        alt = {}
        for l, rec in doc["alt_transport"].items():
            if str(l) not in nodes:
                raise InstanceError(f"alt_transport given for unknown node {l!r}")
            alt[str(l)] = (float(rec["eta"]), float(rec["zeta"]))
    b = doc.get("cost_factor")
    return Instance(
        network=net,
        time_window=_number(doc, "time_window"),
        value_of_time=_number(doc, "value_of_time"),
        cost_factor=None if b is None else float(b),
        alt_transport=alt,
    )


def load_instance(source: str | Path | Mapping) -> Instance:
    """Load an instance from a path, a JSON string, or an already-parsed mapping."""
    if isinstance(source, Mapping):
        return parse_instance(source)
    if isinstance(source, Path) or not source.lstrip().startswith("{"):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"instance is not valid JSON: {exc}") from exc
    return parse_instance(doc)


def load_network(source: str | Path | Mapping) -> Network:
    return load_instance(source).network


def instance_document(inst: Instance) -> dict:
    net = inst.network
    doc = {
        "nodes": list(net.nodes),
        "interchange": net.interchange,
        "edges": [{"from": e.tail, "to": e.head, "rho": e.rho, "time": e.time} for e in net.edges],
        "demand": {l: v for l, v in net.demand.items() if v},
        "supply": {l: v for l, v in net.supply.items() if v},
        "time_window": inst.time_window,
        "value_of_time": inst.value_of_time,
    }
    if inst.cost_factor is not None:
        doc["cost_factor"] = inst.cost_factor
    else:
        doc["alt_transport"] = {l: {"eta": e, "zeta": z} for l, (e, z) in inst.alt_transport.items()}
    return doc
