"""Route (walk) enumeration, leg decomposition and service-tuple timing.

A route is a walk in the network.  Feed-in routes end at the interchange,
feed-out routes start there.  Legs split a route at every interior arrival at
the interchange; neighbouring legs share that interchange visit, so a route
``A I B I`` has legs ``(A, I)`` and ``(I, B, I)``.

Service tuples ``(route, leg, node)``: a feed-in leg serves every distinct
node except its terminal interchange arrival, a feed-out leg serves every
distinct node except its initial interchange departure.  Pick-up times use
the last visit of the node within the leg, drop-off times the first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .network import Network

FEED_IN = "in"
FEED_OUT = "out"

DEFAULT_CEILING = 1_000_000
TIME_EPS = 1e-9


class RouteLimitExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Leg:
    index: int  # 1-based
    start: int  # position of the first node within the route
    nodes: tuple[str, ...]
    cost: float
    time: float

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        return tuple(zip(self.nodes, self.nodes[1:]))


@dataclass(frozen=True)
class Route:
    nodes: tuple[str, ...]
    edge_costs: tuple[float, ...]
    edge_times: tuple[float, ...]
    interchange: str
    direction: str = FEED_IN
    rid: int = field(default=-1, compare=False)
    arrival: tuple[float, ...] = field(init=False, repr=False, compare=False)
    legs: tuple[Leg, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.nodes) < 2:
            raise ValueError("a route needs at least one edge")
        if len(self.edge_costs) != len(self.nodes) - 1 or len(self.edge_times) != len(self.nodes) - 1:
            raise ValueError("edge data does not match node sequence")
        arrival = [0.0]
        for t in self.edge_times:
            arrival.append(arrival[-1] + t)
        object.__setattr__(self, "arrival", tuple(arrival))
        cuts = [0] + [k for k in range(1, len(self.nodes) - 1) if self.nodes[k] == self.interchange]
        cuts.append(len(self.nodes) - 1)
        legs = []
        for i, (a, z) in enumerate(zip(cuts, cuts[1:]), start=1):
            legs.append(Leg(
                index=i,
                start=a,
                nodes=self.nodes[a:z + 1],
                cost=sum(self.edge_costs[a:z]),
                time=arrival[z] - arrival[a],
            ))
        object.__setattr__(self, "legs", tuple(legs))

    @classmethod
    def from_nodes(cls, net: Network, nodes: Sequence[str], direction: str = FEED_IN, rid: int = -1) -> "Route":
        emap = net.edge_map
        try:
            edges = [emap[(a, b)] for a, b in zip(nodes, nodes[1:])]
        except KeyError as exc:
            raise ValueError(f"no edge {exc.args[0]} in network") from None
        return cls(tuple(nodes), tuple(e.rho for e in edges), tuple(e.time for e in edges),
                   net.interchange, direction, rid)

    @property
    def origin(self) -> str:
        return self.nodes[0]

    @property
    def destination(self) -> str:
        return self.nodes[-1]

    @property
    def total_time(self) -> float:
        return self.arrival[-1]

    @property
    def total_cost(self) -> float:
        return sum(self.edge_costs)

    @property
    def n_legs(self) -> int:
        return len(self.legs)

    @property
    def is_simple(self) -> bool:
        return len(self.legs) == 1

    def leg(self, i: int) -> Leg:
        if not 1 <= i <= len(self.legs):
            raise IndexError(f"route has no leg {i}")
        return self.legs[i - 1]

    def label(self) -> str:
        return ">".join(self.nodes)


def service_nodes(route: Route, i: int) -> tuple[str, ...]:
    """Distinct nodes served on leg ``i``, in order of first appearance."""
    leg = route.leg(i)
    span = leg.nodes[:-1] if route.direction == FEED_IN else leg.nodes[1:]
    return tuple(dict.fromkeys(span))


def _positions(route: Route, i: int, node: str) -> list[int]:
    leg = route.leg(i)
    hits = [leg.start + k for k, l in enumerate(leg.nodes) if l == node]
    if not hits:
        raise ValueError(f"node {node!r} is not on leg {i} of {route.label()}")
    return hits


def pickup_time(route: Route, i: int, node: str, time_window: float) -> float:
    """Latest pick-up time at ``node`` on leg ``i`` when the route ends exactly at T."""
    last = _positions(route, i, node)[-1]
    return time_window - route.total_time + route.arrival[last]


def dropoff_time(route: Route, i: int, node: str) -> float:
    """Earliest drop-off time at ``node`` on leg ``i`` when service starts at 0."""
    return route.arrival[_positions(route, i, node)[0]]


def has_cycle_in_leg(route: Route, i: int) -> bool:
    """True if a non-interchange node repeats within leg ``i``."""
    inner = [l for l in route.leg(i).nodes if l != route.interchange]
    return len(inner) != len(set(inner))


def map_route_reverse(route: Route) -> Route:
    """Image of ``route`` on the reversed network (leg ``i`` becomes leg ``n_legs - i + 1``)."""
    other = FEED_OUT if route.direction == FEED_IN else FEED_IN
    return Route(route.nodes[::-1], route.edge_costs[::-1], route.edge_times[::-1],
                 route.interchange, other, route.rid)


def map_tuple_reverse(route: Route, i: int, node: str) -> tuple[int, str]:
    return route.n_legs - i + 1, node


def _check_ceiling(count: int, ceiling: int) -> None:
    if count > ceiling:
        raise RouteLimitExceeded(f"more than {ceiling} routes; raise the ceiling or shrink T")


def enumerate_feedin_routes(net: Network, time_window: float, ceiling: int = DEFAULT_CEILING) -> list[Route]:
    """All walks ending at the interchange with total time within ``time_window``.

    Depth-first extension from every origin; a partial walk is abandoned as
    soon as even the fastest continuation to the interchange overshoots.
    """
    if time_window <= 0:
        raise ValueError("time window must be positive")
    I = net.interchange
    fast = net.fastest_to_interchange
    succ = net.successors
    limit = time_window + TIME_EPS
    out: list[Route] = []
    path: list[str] = []
    costs: list[float] = []
    times: list[float] = []

    def extend(node: str, elapsed: float) -> None:
        for e in succ[node]:
            t = elapsed + e.time
            if t + fast[e.head] > limit:
                continue
            path.append(e.head)
            costs.append(e.rho)
            times.append(e.time)
            if e.head == I:
                out.append(Route(tuple(path), tuple(costs), tuple(times), I, FEED_IN, len(out)))
                _check_ceiling(len(out), ceiling)
            extend(e.head, t)
            path.pop()
            costs.pop()
            times.pop()

    for origin in net.nodes:
        if fast[origin] > limit and origin != I:
            continue
        path[:] = [origin]
        extend(origin, 0.0)
    return out


def enumerate_feedout_routes(net: Network, time_window: float, ceiling: int = DEFAULT_CEILING) -> list[Route]:
    """All walks starting at the interchange with total time within ``time_window``."""
    if time_window <= 0:
        raise ValueError("time window must be positive")
    I = net.interchange
    succ = net.successors
    limit = time_window + TIME_EPS
    out: list[Route] = []
    path = [I]
    costs: list[float] = []
    times: list[float] = []

    def extend(node: str, elapsed: float) -> None:
        for e in succ[node]:
            t = elapsed + e.time
            if t > limit:
                continue
            path.append(e.head)
            costs.append(e.rho)
            times.append(e.time)
            out.append(Route(tuple(path), tuple(costs), tuple(times), I, FEED_OUT, len(out)))
            _check_ceiling(len(out), ceiling)
            extend(e.head, t)
            path.pop()
            costs.pop()
            times.pop()

    extend(I, 0.0)
    return out


def route_records(routes: Sequence[Route]) -> Iterator[dict]:
    for r in routes:
        yield {
            "id": r.rid,
            "nodes": r.label(),
            "legs": r.n_legs,
            "time": r.total_time,
            "cost": r.total_cost,
            "leg_costs": ";".join(f"{leg.cost:g}" for leg in r.legs),
        }


def count_service_tuples(routes: Sequence[Route]) -> int:
    return sum(len(service_nodes(r, i)) for r in routes for i in range(1, r.n_legs + 1))
