"""Maximum viable prices, operator revenues and the cost-factor model.

Perceived cost of a trip is ``money + alpha * minutes``.  A feeder service can
charge at most the perceived cost of the best alternative minus the value of
the time spent on board, and every unit of allocation costs the operator
``OPERATIONAL_COST``.

In the cost-factor model the best alternative from node ``l`` follows some
single-leg route ``r`` to the interchange, takes ``t_r`` minutes and costs
``b * c_r``; the chosen route minimises ``alpha * t_r + b * c_r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .network import Instance, Network, cheapest_cost, reverse
from .routes import FEED_IN, Route, dropoff_time, pickup_time, service_nodes, TIME_EPS

OPERATIONAL_COST = 1.0


def max_viable_price(perceived: float, alpha: float, time_window: float, pickup: float) -> float:
    return perceived - alpha * (time_window - pickup)


def feedout_price(eta: float, zeta: float, alpha: float, dropoff: float) -> float:
    return alpha * (eta - dropoff) + zeta


# ---------------------------------------------------------------------------
# alternative transport


@dataclass(frozen=True)
class PathOption:
    nodes: tuple[str, ...]
    time: float
    cost: float

    def tie_key(self) -> tuple:
        return (self.cost, self.time, self.nodes)


def simple_route_frontier(net: Network, time_window: float) -> dict[str, list[PathOption]]:
    """Pareto-optimal (time, cost) single-leg paths from every node to the interchange.

    Only paths without repeated nodes are explored: with strictly positive
    edge times and costs a repeated node can be cut out, which lowers both
    coordinates, so walks with cycles are never on the frontier.
    """
    I = net.interchange
    fast = net.fastest_to_interchange
    succ = net.successors
    limit = time_window + TIME_EPS
    frontier: dict[str, list[PathOption]] = {}
    for origin in net.nodes:
        if origin == I or fast[origin] > limit:
            frontier[origin] = []
            continue
        found: list[PathOption] = []
        path = [origin]
        on_path = {origin}

        def extend(node: str, elapsed: float, spent: float) -> None:
            for e in succ[node]:
                t = elapsed + e.time
                if e.head in on_path or t + fast[e.head] > limit:
                    continue
                if e.head == I:
                    found.append(PathOption(tuple(path) + (I,), t, spent + e.rho))
                    continue
                path.append(e.head)
                on_path.add(e.head)
                extend(e.head, t, spent + e.rho)
                path.pop()
                on_path.discard(e.head)

        extend(origin, 0.0, 0.0)
        frontier[origin] = _pareto(found)
    return frontier


def _pareto(options: list[PathOption]) -> list[PathOption]:
    best_per_point: dict[tuple[float, float], PathOption] = {}
    for o in options:
        key = (o.time, o.cost)
        if key not in best_per_point or o.nodes < best_per_point[key].nodes:
            best_per_point[key] = o
    pts = sorted(best_per_point.values(), key=lambda o: (o.time, o.cost))
    keep: list[PathOption] = []
    min_cost = math.inf
    for o in pts:
        if o.cost < min_cost:
            keep.append(o)
            min_cost = o.cost
    return keep


def best_option(options: Sequence[PathOption], alpha: float, b: float) -> PathOption:
    """Minimiser of ``alpha * t + b * c``; ties prefer lower cost, then time, then node sequence.

    ``b = inf`` selects the cheapest option.
    """
    if not options:
        raise ValueError("no options")
    if math.isinf(b):
        return min(options, key=PathOption.tie_key)
    return min(options, key=lambda o: (alpha * o.time + b * o.cost,) + o.tie_key())


@dataclass(frozen=True)
class AltTransport:
    """Best alternative transport per node: travel time ``eta``, price ``zeta``."""

    interchange: str
    value_of_time: float
    eta: Mapping[str, float]
    zeta: Mapping[str, float]
    cost_factor: float | None = None
    best_routes: Mapping[str, PathOption] = field(default_factory=dict)
    unreachable: frozenset[str] = frozenset()

    def perceived_cost(self, node: str) -> float:
        if node == self.interchange:
            return 0.0
        if node in self.unreachable or node not in self.eta:
            raise KeyError(f"no alternative transport known for node {node!r}")
        return self.value_of_time * self.eta[node] + self.zeta[node]


def best_alt_transport(net: Network, time_window: float, alpha: float, b: float,
                       frontier: Mapping[str, list[PathOption]] | None = None) -> AltTransport:
    if b < 0:
        raise ValueError("cost factor must be nonnegative")
    frontier = frontier if frontier is not None else simple_route_frontier(net, time_window)
    eta, zeta, routes, missing = {}, {}, {}, set()
    for l in net.nodes:
        if l == net.interchange:
            continue
        opts = frontier.get(l) or []
        if not opts:
            missing.add(l)
            continue
        r = best_option(opts, alpha, b)
        routes[l] = r
        eta[l] = r.time
        zeta[l] = b * r.cost
    return AltTransport(net.interchange, alpha, eta, zeta, b, routes, frozenset(missing))


def explicit_alt_transport(net: Network, alpha: float, table: Mapping[str, tuple[float, float]]) -> AltTransport:
    eta = {l: float(v[0]) for l, v in table.items() if l != net.interchange}
    zeta = {l: float(v[1]) for l, v in table.items() if l != net.interchange}
    missing = frozenset(l for l in net.nodes if l != net.interchange and l not in eta)
    return AltTransport(net.interchange, alpha, eta, zeta, None, {}, missing)


def feedin_alt_transport(inst: Instance, frontier=None) -> AltTransport:
    net = inst.network
    if inst.cost_factor is not None:
        return best_alt_transport(net, inst.time_window, inst.value_of_time, inst.cost_factor, frontier)
    return explicit_alt_transport(net, inst.value_of_time, inst.alt_transport)


def feedout_alt_transport(inst: Instance, frontier=None) -> AltTransport:
    """Alternative transport from the interchange to each node of a feed-out network.

    Under the cost-factor model this is the feed-in model evaluated on the
    reversed network, which is what makes the two problems mirror each other.
    """
    if inst.cost_factor is not None:
        return best_alt_transport(reverse(inst.network), inst.time_window, inst.value_of_time,
                                  inst.cost_factor, frontier)
    return explicit_alt_transport(inst.network, inst.value_of_time, inst.alt_transport)


# ---------------------------------------------------------------------------
# price tables


@dataclass(frozen=True)
class ServicePrice:
    node: str
    time: float  # pick-up (feed-in) or drop-off (feed-out) time
    price: float
    revenue: float


class PriceTable:
    """Prices and operator revenues for every service tuple of a route set."""

    def __init__(self, direction: str, entries: dict[tuple[str, ...], tuple[tuple[ServicePrice, ...], ...]]):
        self.direction = direction
        self._entries = entries

    def __contains__(self, route: Route) -> bool:
        return route.nodes in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def leg(self, route: Route, i: int) -> tuple[ServicePrice, ...]:
        return self._entries[route.nodes][i - 1]

    def legs(self, route: Route) -> tuple[tuple[ServicePrice, ...], ...]:
        return self._entries[route.nodes]

    def revenue(self, route: Route, i: int, node: str) -> float:
        for sp in self.leg(route, i):
            if sp.node == node:
                return sp.revenue
        raise KeyError((route.label(), i, node))

    def records(self, routes: Sequence[Route]) -> Iterator[dict]:
        for r in routes:
            for i, leg in enumerate(self.legs(r), start=1):
                for sp in leg:
                    yield {"route": r.rid, "leg": i, "node": sp.node, "time": sp.time,
                           "price": sp.price, "revenue": sp.revenue}


def feedin_price_table(routes: Sequence[Route], alt: AltTransport, time_window: float,
                       op_cost: float = OPERATIONAL_COST) -> PriceTable:
    alpha = alt.value_of_time
    entries = {}
    for r in routes:
        legs = []
        for i in range(1, r.n_legs + 1):
            row = []
            for l in service_nodes(r, i):
                t = pickup_time(r, i, l, time_window)
                p = max_viable_price(alt.perceived_cost(l), alpha, time_window, t)
                row.append(ServicePrice(l, t, p, p - op_cost))
            legs.append(tuple(row))
        entries[r.nodes] = tuple(legs)
    return PriceTable(FEED_IN, entries)


def feedout_price_table(routes: Sequence[Route], alt: AltTransport,
                        op_cost: float = OPERATIONAL_COST) -> PriceTable:
    alpha = alt.value_of_time
    entries = {}
    for r in routes:
        legs = []
        for i in range(1, r.n_legs + 1):
            row = []
            for l in service_nodes(r, i):
                t = dropoff_time(r, i, l)
                if l == alt.interchange:
                    p = -alpha * t
                else:
                    p = feedout_price(alt.eta[l], alt.zeta[l], alpha, t)
                row.append(ServicePrice(l, t, p, p - op_cost))
            legs.append(tuple(row))
        entries[r.nodes] = tuple(legs)
    return PriceTable("out", entries)


# ---------------------------------------------------------------------------
# viability


def perceived_cost_curve(options: Sequence[PathOption], alpha: float, b: float) -> float:
    """``g_l(b)``: lower envelope of the lines ``alpha * t + b * c``."""
    return min(alpha * o.time + b * o.cost for o in options)


def viability_threshold(net: Network, time_window: float, alpha: float, node: str,
                        frontier: Mapping[str, list[PathOption]] | None = None) -> float | None:
    """Smallest cost factor at which a multi-leg route via ``node`` can be worth running.

    Returns ``None`` when ``node`` has no single-leg route to the interchange
    or cannot be reached from it.
    """
    if node == net.interchange:
        return None
    frontier = frontier if frontier is not None else simple_route_frontier(net, time_window)
    opts = frontier.get(node) or []
    back = cheapest_cost(net, net.interchange, node)
    if not opts or math.isinf(back):
        return None
    at_one = best_option(opts, alpha, 1.0)
    cheapest = best_option(opts, alpha, math.inf)
    return 1.0 + (1.0 + back + alpha * (at_one.time - cheapest.time)) / at_one.cost


@dataclass
class MultilegReport:
    cost_factor: float
    has_multileg: bool  # some reduced route has more than one leg
    has_interchange_route: bool  # some single-leg reduced route starts at the interchange
    envelope_condition: dict[str, bool]  # g(b) >= g(1) + c*(I, l) + 1
    threshold_condition: dict[str, bool]  # b >= b_l*
    thresholds: dict[str, float | None]

    @property
    def cond_a(self) -> bool:
        return self.has_multileg

    @property
    def cond_b(self) -> bool:
        return self.has_interchange_route

    @property
    def cond_c(self) -> bool:
        return any(self.envelope_condition.values())

    @property
    def cond_d(self) -> bool:
        return any(self.threshold_condition.values())

    def chain_holds(self) -> bool:
        per_node = all(self.threshold_condition[l] for l, ok in self.envelope_condition.items() if ok)
        return ((not self.cond_a or self.cond_b) and (not self.cond_b or self.cond_c)
                and (not self.cond_c or self.cond_d) and per_node)


def check_multileg_conditions(net: Network, time_window: float, alpha: float, b: float,
                              reduced: Sequence[Route] | None = None, tol: float = 1e-9) -> MultilegReport:
    """Evaluate the four nested viability conditions for multi-leg service.

    ``reduced`` is the reduced feed-in route set at this ``b``; it is computed
    when not supplied.
    """
    frontier = simple_route_frontier(net, time_window)
    if reduced is None:
        from .reduction import reduce_feedin
        from .routes import enumerate_feedin_routes

        routes = enumerate_feedin_routes(net, time_window)
        alt = best_alt_transport(net, time_window, alpha, b, frontier)
        reduced = reduce_feedin(routes, feedin_price_table(routes, alt, time_window))
    has_multi = any(r.n_legs > 1 for r in reduced)
    has_from_I = any(r.n_legs == 1 and r.origin == net.interchange for r in reduced)
    env, thr, thresholds = {}, {}, {}
    for l in net.nodes:
        if l == net.interchange:
            continue
        opts = frontier.get(l) or []
        back = cheapest_cost(net, net.interchange, l)
        bl = viability_threshold(net, time_window, alpha, l, frontier)
        thresholds[l] = bl
        if not opts or math.isinf(back):
            env[l] = thr[l] = False
            continue
        g_b = perceived_cost_curve(opts, alpha, b)
        g_1 = perceived_cost_curve(opts, alpha, 1.0)
        scale = 1.0 + abs(g_b)
        env[l] = g_b - (g_1 + back + 1.0) >= -tol * scale
        thr[l] = b >= bl - tol * (1.0 + abs(bl))
    return MultilegReport(b, has_multi, has_from_I, env, thr, thresholds)
