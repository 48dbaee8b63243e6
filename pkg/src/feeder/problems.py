"""Feed-in, supply-optimisation and feed-out linear programs.

Variables are keyed ``("f", rid)`` for route flows, ``("a", rid, leg, node)``
for allocations and ``("S", node)`` for supply placed at a node.  All three
problems maximise operator profit: revenue of every allocation minus the
traversal cost of every unit of route flow.

Reduced forms drop the route-flow variables.  In the supply problem every
used route is filled at its origin on the first leg, so the first-leg
allocation at the origin stands in for the flow; in the feed-out problem the
final-leg allocation at the destination plays that role.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from .lp import EQ, LE, LinearProgram, LpSolution, Tolerances, solve
from .network import Instance, Network, reverse
from .pricing import (AltTransport, PriceTable, feedin_alt_transport, feedin_price_table,
                      feedout_alt_transport, feedout_price_table, simple_route_frontier)
from .reduction import ReducedSet, reduce_feedin, reduce_feedin_sets, reduce_feedout, reduce_supplyopt
from .routes import (DEFAULT_CEILING, Route, enumerate_feedin_routes, enumerate_feedout_routes,
                     has_cycle_in_leg, map_route_reverse, service_nodes)

log = logging.getLogger(__name__)

FEED_IN = "feed-in"
SUPPLY_OPT = "supply-opt"
FEED_OUT = "feed-out"
KINDS = (FEED_IN, SUPPLY_OPT, FEED_OUT)
FULL = "full"
REDUCED = "reduced"


def _tuples(route: Route):
    for i in range(1, route.n_legs + 1):
        for l in service_nodes(route, i):
            yield i, l


# ---------------------------------------------------------------------------
# problem data


@dataclass(frozen=True)
class FeedInInstance:
    network: Network
    time_window: float
    value_of_time: float
    routes: tuple[Route, ...]
    prices: PriceTable

    @property
    def demand(self) -> Mapping[str, float]:
        return self.network.demand

    @property
    def supply(self) -> Mapping[str, float]:
        return self.network.supply


@dataclass(frozen=True)
class SupplyOptInstance:
    """Supply placement is a decision; only the total ``total_supply`` is given.

    ``routes`` is the candidate set for the full form; the reduced form prunes
    it further.  Nodes without any profitable single-leg route are reported
    in :attr:`unprofitable_nodes` and kept in the model.
    """

    network: Network
    time_window: float
    value_of_time: float
    routes: tuple[Route, ...]
    prices: PriceTable
    total_supply: float

    def __post_init__(self) -> None:
        if not self.total_supply >= 0:
            raise ValueError("total supply must be nonnegative")

    @property
    def demand(self) -> Mapping[str, float]:
        return self.network.demand

    @cached_property
    def reduced_routes(self) -> list[Route]:
        return reduce_supplyopt(reduce_feedin(self.routes, self.prices), self.prices)

    @cached_property
    def best_simple_margin(self) -> dict[str, float]:
        return best_simple_margins(self.network, self.routes, self.prices, by="origin")

    @property
    def unprofitable_nodes(self) -> list[str]:
        I = self.network.interchange
        return [l for l, m in self.best_simple_margin.items() if l != I and m < 0]


@dataclass(frozen=True)
class FeedOutInstance:
    """Feed-out from the interchange; ``alt`` describes trips from the interchange to each node."""

    network: Network
    time_window: float
    value_of_time: float
    routes: tuple[Route, ...]
    prices: PriceTable
    total_supply: float
    alt: AltTransport | None = None

    def __post_init__(self) -> None:
        if not self.total_supply >= 0:
            raise ValueError("total supply must be nonnegative")

    @property
    def demand(self) -> Mapping[str, float]:
        return self.network.demand

    @cached_property
    def reduced_routes(self) -> list[Route]:
        mirror = self.mirror_routes()
        prices = feedin_price_table(mirror, self._mirror_alt(), self.time_window)
        minus = reduce_supplyopt(reduce_feedin(mirror, prices), prices)
        return reduce_feedout(self.routes, minus)

    @cached_property
    def best_simple_margin(self) -> dict[str, float]:
        return best_simple_margins(self.network, self.routes, self.prices, by="destination")

    def mirror_routes(self) -> list[Route]:
        return [map_route_reverse(r) for r in self.routes]

    def _mirror_alt(self) -> AltTransport:
        if self.alt is None:
            raise ValueError("feed-out instance carries no alternative-transport data")
        return self.alt


def best_simple_margins(net: Network, routes: Sequence[Route], prices: PriceTable,
                        by: str = "origin") -> dict[str, float]:
    """Best ``revenue - cost`` of a single-leg route serving its own end node.

    ``by="origin"`` looks at pick-ups at the origin (feed-in); ``"destination"``
    at drop-offs at the destination (feed-out).  Nodes without such a route
    get ``-inf``.
    """
    best = {l: -math.inf for l in net.nodes}
    for r in routes:
        if r.n_legs != 1:
            continue
        l = r.origin if by == "origin" else r.destination
        if l == net.interchange:
            continue
        best[l] = max(best[l], prices.revenue(r, 1, l) - r.total_cost)
    return best


# ---------------------------------------------------------------------------
# solutions


@dataclass
class FlowSolution:
    kind: str
    form: str
    problem: object
    routes: tuple[Route, ...]
    objective: float
    route_flows: dict[int, float]
    allocations: dict[tuple[int, int, str], float]
    supply: dict[str, float] = field(default_factory=dict)
    lp: LinearProgram | None = None
    lp_solution: LpSolution | None = None

    @property
    def status(self) -> str:
        return self.lp_solution.status if self.lp_solution else "optimal"

    @property
    def is_optimal(self) -> bool:
        return self.lp_solution is not None and self.lp_solution.is_optimal

    @property
    def node_totals(self) -> dict[str, float]:
        out: dict[str, float] = {}
        for (_, _, l), v in self.allocations.items():
            out[l] = out.get(l, 0.0) + v
        return out

    def routes_used(self, tol: float = 1e-7) -> int:
        return sum(1 for v in self.route_flows.values() if v > tol)

    def flow_records(self):
        by_id = {r.rid: r for r in self.routes}
        for rid, v in sorted(self.route_flows.items()):
            yield {"route": rid, "nodes": by_id[rid].label(), "flow": v}

    def allocation_records(self):
        for (rid, i, l), v in sorted(self.allocations.items()):
            yield {"route": rid, "leg": i, "node": l, "allocation": v}


def _extract(kind: str, form: str, problem, routes: Sequence[Route], lp: LinearProgram,
             sol: LpSolution) -> FlowSolution:
    flows, allocs, supply = {}, {}, {}
    if sol.is_optimal:
        x = sol.x
        for j, key in enumerate(lp.var_keys):
            v = float(x[j])
            if key[0] == "f":
                flows[key[1]] = v
            elif key[0] == "a":
                allocs[key[1:]] = v
            elif key[0] == "S":
                supply[key[1]] = v
        if form == REDUCED:
            for r in routes:
                anchor = ("a", r.rid, 1, r.origin) if kind == SUPPLY_OPT else ("a", r.rid, r.n_legs, r.destination)
                flows[r.rid] = float(x[lp.index(anchor)])
    objective = float(sol.objective) if sol.is_optimal else math.nan
    return FlowSolution(kind, form, problem, tuple(routes), objective, flows, allocs, supply, lp, sol)


# ---------------------------------------------------------------------------
# builders


def _add_flow_block(lp: LinearProgram, routes: Sequence[Route], prices: PriceTable) -> None:
    """Route flows, allocations, leg rows and demand rows shared by the full forms."""
    for r in routes:
        f = lp.add_variable(-r.total_cost, ("f", r.rid))
        for i in range(1, r.n_legs + 1):
            leg = {}
            for sp in prices.leg(r, i):
                leg[lp.add_variable(sp.revenue, ("a", r.rid, i, sp.node))] = 1.0
            leg[f] = -1.0
            lp.add_row(leg, LE, 0.0, ("leg", r.rid, i))


def _add_demand_rows(lp: LinearProgram, net: Network, demand: Mapping[str, float]) -> None:
    per_node: dict[str, dict[int, float]] = {}
    for j, key in enumerate(lp.var_keys):
        if key[0] == "a" and key[3] != net.interchange:
            per_node.setdefault(key[3], {})[j] = 1.0
    for l in net.nodes:
        if l in per_node:
            lp.add_row(per_node[l], LE, float(demand[l]), ("demand", l))


def _origin_flows(lp: LinearProgram, routes: Sequence[Route]) -> dict[str, dict[int, float]]:
    out: dict[str, dict[int, float]] = {}
    for r in routes:
        out.setdefault(r.origin, {})[lp.index(("f", r.rid))] = 1.0
    return out


def build_feedin_lp(inst: FeedInInstance) -> LinearProgram:
    lp = LinearProgram()
    _add_flow_block(lp, inst.routes, inst.prices)
    for l, coeffs in _origin_flows(lp, inst.routes).items():
        lp.add_row(coeffs, LE, float(inst.supply[l]), ("supply", l))
    _add_demand_rows(lp, inst.network, inst.demand)
    return lp


def interchange_supply(net: Network, s: float) -> float:
    """Supply parked at the interchange under the canonical placement rule."""
    return max(0.0, s - sum(v for l, v in net.demand.items() if l != net.interchange))


def build_supplyopt_lp(inst: SupplyOptInstance, form: str = FULL,
                       fix_interchange_supply: bool = False) -> LinearProgram:
    net = inst.network
    lp = LinearProgram()
    if form == FULL:
        routes = inst.routes
        _add_flow_block(lp, routes, inst.prices)
        S = {l: lp.add_variable(0.0, ("S", l)) for l in net.nodes}
        origin = _origin_flows(lp, routes)
        for l in net.nodes:
            if l in origin:
                lp.add_row({**origin[l], S[l]: -1.0}, LE, 0.0, ("supply", l))
    elif form == REDUCED:
        routes = inst.reduced_routes
        for r in routes:
            idx = {}
            for i in range(1, r.n_legs + 1):
                cost = r.leg(i).cost
                for sp in inst.prices.leg(r, i):
                    idx[(i, sp.node)] = lp.add_variable(sp.revenue - cost, ("a", r.rid, i, sp.node))
            anchor = idx[(1, r.origin)]
            for i in range(1, r.n_legs + 1):
                row: dict[int, float] = {}
                for l in service_nodes(r, i):
                    row[idx[(i, l)]] = row.get(idx[(i, l)], 0.0) + 1.0
                row[anchor] = row.get(anchor, 0.0) - 1.0
                lp.add_row(row, EQ, 0.0, ("leg", r.rid, i))
        S = {l: lp.add_variable(0.0, ("S", l)) for l in net.nodes}
        origin: dict[str, dict[int, float]] = {}
        for r in routes:
            origin.setdefault(r.origin, {})[lp.index(("a", r.rid, 1, r.origin))] = 1.0
        # nodes that start no route keep a free supply variable: idle supply
        for l in net.nodes:
            if l in origin:
                lp.add_row({**origin[l], S[l]: -1.0}, EQ, 0.0, ("supply", l))
    else:
        raise ValueError(f"unknown form {form!r}")
    _add_demand_rows(lp, net, inst.demand)
    lp.add_row({j: 1.0 for j in S.values()}, LE, float(inst.total_supply), ("total_supply",))
    if fix_interchange_supply:
        lp.add_row({S[net.interchange]: 1.0}, EQ, interchange_supply(net, inst.total_supply),
                   ("interchange_supply",))
    return lp


def build_feedout_lp(inst: FeedOutInstance, form: str = FULL) -> LinearProgram:
    lp = LinearProgram()
    if form == FULL:
        routes = inst.routes
        _add_flow_block(lp, routes, inst.prices)
        lp.add_row({lp.index(("f", r.rid)): 1.0 for r in routes}, LE, float(inst.total_supply),
                   ("total_supply",))
    elif form == REDUCED:
        routes = inst.reduced_routes
        anchors = {}
        for r in routes:
            idx = {}
            for i in range(1, r.n_legs + 1):
                cost = r.leg(i).cost
                for sp in inst.prices.leg(r, i):
                    idx[(i, sp.node)] = lp.add_variable(sp.revenue - cost, ("a", r.rid, i, sp.node))
            anchor = idx[(r.n_legs, r.destination)]
            anchors[r.rid] = anchor
            for i in range(1, r.n_legs + 1):
                row: dict[int, float] = {}
                for l in service_nodes(r, i):
                    row[idx[(i, l)]] = row.get(idx[(i, l)], 0.0) + 1.0
                row[anchor] = row.get(anchor, 0.0) - 1.0
                lp.add_row(row, EQ, 0.0, ("leg", r.rid, i))
        lp.add_row({j: 1.0 for j in anchors.values()}, LE, float(inst.total_supply), ("total_supply",))
    else:
        raise ValueError(f"unknown form {form!r}")
    _add_demand_rows(lp, inst.network, inst.demand)
    return lp


# ---------------------------------------------------------------------------
# solves


def solve_feedin(inst: FeedInInstance, tol: Tolerances | None = None, method: str = "auto") -> FlowSolution:
    lp = build_feedin_lp(inst)
    return _extract(FEED_IN, FULL, inst, inst.routes, lp, solve(lp, tol, method))


def solve_supplyopt(inst: SupplyOptInstance, form: str = REDUCED, fix_interchange_supply: bool = False,
                    tol: Tolerances | None = None, method: str = "auto") -> FlowSolution:
    lp = build_supplyopt_lp(inst, form, fix_interchange_supply)
    sol = solve(lp, tol, method)
    if form == REDUCED and sol.status == "infeasible":
        log.warning("reduced supply problem infeasible; falling back to the full form")
        return solve_supplyopt(inst, FULL, fix_interchange_supply, tol, method)
    routes = inst.reduced_routes if form == REDUCED else inst.routes
    return _extract(SUPPLY_OPT, form, inst, routes, lp, sol)


def solve_feedout(inst: FeedOutInstance, form: str = REDUCED, tol: Tolerances | None = None,
                  method: str = "auto") -> FlowSolution:
    lp = build_feedout_lp(inst, form)
    sol = solve(lp, tol, method)
    if form == REDUCED and sol.status == "infeasible":
        log.warning("reduced feed-out problem infeasible; falling back to the full form")
        return solve_feedout(inst, FULL, tol, method)
    routes = inst.reduced_routes if form == REDUCED else inst.routes
    return _extract(FEED_OUT, form, inst, routes, lp, sol)


def equivalent_supply_instance(inst: FeedOutInstance) -> SupplyOptInstance:
    """The supply-placement feed-in problem on the reversed network that mirrors ``inst``."""
    mirror = inst.mirror_routes()
    prices = feedin_price_table(mirror, inst._mirror_alt(), inst.time_window)
    return SupplyOptInstance(reverse(inst.network), inst.time_window, inst.value_of_time,
                             tuple(mirror), prices, inst.total_supply)


def solve_feedout_via_equivalence(inst: FeedOutInstance, tol: Tolerances | None = None,
                                  method: str = "auto") -> FlowSolution:
    """Solve the mirrored supply problem and map its optimum back onto feed-out routes.

    Leg ``i`` of a feed-out route corresponds to leg ``n_legs - i + 1`` of its
    reversal, and route ids are shared between a route and its reversal.
    """
    mirror = equivalent_supply_instance(inst)
    fin = solve_supplyopt(mirror, REDUCED, fix_interchange_supply=True, tol=tol, method=method)
    by_id = {r.rid: r for r in inst.routes}
    if not fin.is_optimal:
        return FlowSolution(FEED_OUT, "equivalence", inst, (), math.nan, {}, {}, {}, fin.lp, fin.lp_solution)
    used = [by_id[r.rid] for r in fin.routes]
    flows = {rid: v for rid, v in fin.route_flows.items()}
    allocs = {}
    for r in used:
        for i, l in _tuples(r):
            allocs[(r.rid, i, l)] = fin.allocations[(r.rid, r.n_legs - i + 1, l)]
    objective = sum(inst.prices.revenue(by_id[rid], i, l) * v for (rid, i, l), v in allocs.items())
    objective -= sum(by_id[rid].total_cost * v for rid, v in flows.items())
    return FlowSolution(FEED_OUT, "equivalence", inst, tuple(used), objective, flows, allocs, {},
                        fin.lp, fin.lp_solution)


# ---------------------------------------------------------------------------
# closed forms


def absolute_max_profit(net: Network, routes: Sequence[Route], prices: PriceTable,
                        direction: str = FEED_IN) -> float:
    """Profit with unlimited supply: every unit of demand rides its best single-leg route.

    ``routes`` is the reduced route set of the problem.  Nodes without a
    profitable single-leg route contribute nothing.
    """
    margins = best_simple_margins(net, routes, prices,
                                  by="origin" if direction == FEED_IN else "destination")
    total = 0.0
    for l, d in net.demand.items():
        if l == net.interchange or d == 0:
            continue
        total += d * max(margins[l], 0.0)
    return total


# ---------------------------------------------------------------------------
# convenience models


@dataclass
class FeedInModel:
    """Routes, prices and reduced sets of a feed-in instance."""

    instance: Instance
    routes: list[Route]
    alt: AltTransport
    prices: PriceTable
    reduced_sets: ReducedSet
    minus: list[Route]

    @classmethod
    def build(cls, inst: Instance, ceiling: int = DEFAULT_CEILING) -> "FeedInModel":
        net = inst.network
        routes = enumerate_feedin_routes(net, inst.time_window, ceiling)
        alt = feedin_alt_transport(inst, simple_route_frontier(net, inst.time_window)
                                   if inst.cost_factor is not None else None)
        prices = feedin_price_table(routes, alt, inst.time_window)
        sets = reduce_feedin_sets(routes, prices)
        return cls(inst, routes, alt, prices, sets, reduce_supplyopt(sets.routes, prices))

    @property
    def reduced(self) -> list[Route]:
        return list(self.reduced_sets.routes)

    def feedin(self, routes: Sequence[Route] | None = None) -> FeedInInstance:
        i = self.instance
        return FeedInInstance(i.network, i.time_window, i.value_of_time,
                              tuple(self.routes if routes is None else routes), self.prices)

    def supplyopt(self, s: float, routes: Sequence[Route] | None = None) -> SupplyOptInstance:
        i = self.instance
        return SupplyOptInstance(i.network, i.time_window, i.value_of_time,
                                 tuple(self.routes if routes is None else routes), self.prices, float(s))

    def j_max(self) -> float:
        return absolute_max_profit(self.instance.network, self.minus, self.prices, FEED_IN)


@dataclass
class FeedOutModel:
    instance: Instance
    routes: list[Route]
    alt: AltTransport
    prices: PriceTable

    @classmethod
    def build(cls, inst: Instance, ceiling: int = DEFAULT_CEILING) -> "FeedOutModel":
        routes = enumerate_feedout_routes(inst.network, inst.time_window, ceiling)
        alt = feedout_alt_transport(inst)
        return cls(inst, routes, alt, feedout_price_table(routes, alt))

    def feedout(self, s: float) -> FeedOutInstance:
        i = self.instance
        return FeedOutInstance(i.network, i.time_window, i.value_of_time, tuple(self.routes),
                               self.prices, float(s), self.alt)

    def j_max(self) -> float:
        return absolute_max_profit(self.instance.network, self.feedout(0.0).reduced_routes,
                                   self.prices, FEED_OUT)


# ---------------------------------------------------------------------------
# diagnostics


class NotOptimalError(ValueError):
    pass


@dataclass
class PropertyCheck:
    name: str
    passed: bool
    offenders: list[str] = field(default_factory=list)
    applicable: bool = True


@dataclass
class Diagnostics:
    kind: str
    checks: list[PropertyCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[PropertyCheck]:
        return [c for c in self.checks if not c.passed]

    def summary(self) -> dict[str, str]:
        return {c.name: ("pass" if c.passed else "FAIL") if c.applicable else "n/a" for c in self.checks}


class _Checker:
    def __init__(self, sol: FlowSolution):
        prob = sol.problem
        self.sol = sol
        self.prob = prob
        self.net: Network = prob.network
        self.prices: PriceTable = prob.prices
        self.routes = sol.routes
        s = getattr(prob, "total_supply", None)
        if s is None:
            s = sum(prob.supply.values())
        self.s = float(s)
        self.total_demand = self.net.total_demand
        self.eps = 1e-6 * (1.0 + abs(sol.objective))
        self.flow_eps = 1e-7 * (1.0 + self.total_demand + self.s)
        self.checks: list[PropertyCheck] = []

    def f(self, r: Route) -> float:
        return self.sol.route_flows.get(r.rid, 0.0)

    def a(self, r: Route, i: int, l: str) -> float:
        return self.sol.allocations.get((r.rid, i, l), 0.0)

    def beta(self, r: Route, i: int, l: str) -> float:
        return self.prices.revenue(r, i, l)

    def used(self, r: Route) -> bool:
        return self.f(r) > self.flow_eps

    def leg_sum(self, r: Route, i: int) -> float:
        return sum(self.a(r, i, l) for l in service_nodes(r, i))

    def record(self, name: str, offenders: list[str], applicable: bool = True) -> None:
        self.checks.append(PropertyCheck(name, not offenders, offenders, applicable))

    # -- feed-in family -----------------------------------------------------

    def legs_full(self, name: str, first: int) -> None:
        bad = []
        for r in self.routes:
            for i in range(first, r.n_legs + 1):
                if abs(self.leg_sum(r, i) - self.f(r)) > self.flow_eps:
                    bad.append(f"{r.label()} leg {i}")
        self.record(name, bad)

    def nonnegative_revenue(self, name: str) -> None:
        bad = []
        for r in self.routes:
            if self.used(r) and not any(self.a(r, i, l) > self.flow_eps for i, l in _tuples(r)):
                bad.append(f"{r.label()} carries flow but serves nobody")
            for i, l in _tuples(r):
                if self.a(r, i, l) > self.flow_eps and self.beta(r, i, l) < -self.eps:
                    bad.append(f"{r.label()} leg {i} node {l}")
        self.record(name, bad)

    def route_pays(self, name: str) -> None:
        bad = []
        for r in self.routes:
            rev = sum(self.beta(r, i, l) * self.a(r, i, l) for i, l in _tuples(r))
            if rev < self.f(r) * r.total_cost - self.eps:
                bad.append(r.label())
        self.record(name, bad)

    def legs_pay(self, name: str, legs: str) -> None:
        """Every positive allocation on the selected legs earns at least the leg cost."""
        bad = []
        for r in self.routes:
            if legs == "secondary":
                selected = range(2, r.n_legs + 1)
            elif legs == "simple":
                selected = range(1, 2) if r.n_legs == 1 else range(0)
            else:
                selected = range(1, r.n_legs + 1)
            for i in selected:
                c = r.leg(i).cost
                served = [l for l in service_nodes(r, i) if self.a(r, i, l) > self.flow_eps]
                if self.used(r) and not served:
                    bad.append(f"{r.label()} leg {i} unused")
                for l in served:
                    if self.beta(r, i, l) < c - self.eps:
                        bad.append(f"{r.label()} leg {i} node {l}")
        self.record(name, bad)

    def reduced_only(self, name: str) -> None:
        keep = {r.nodes for r in reduce_feedin(self.routes, self.prices)}
        self.record(name, [r.label() for r in self.routes if self.used(r) and r.nodes not in keep])

    # -- supply problem -----------------------------------------------------

    def a2_strict(self, margins: Mapping[str, float]) -> bool:
        I = self.net.interchange
        return all(margins[l] > self.eps for l, d in self.net.demand.items() if l != I and d > 0)

    def supply_family(self) -> None:
        prob: SupplyOptInstance = self.prob
        I = self.net.interchange
        self.reduced_only("supply_reduced_routes_only")
        bad = []
        for r in self.routes:
            if abs(self.a(r, 1, r.origin) - self.f(r)) > self.flow_eps:
                bad.append(f"{r.label()} origin allocation differs from flow")
            if r.origin == I and self.used(r):
                bad.append(f"{r.label()} starts at the interchange")
        self.record("filled_at_origin", bad)
        bad = []
        for r in self.routes:
            if self.used(r) and self.beta(r, 1, r.origin) < r.leg(1).cost - self.eps:
                bad.append(f"{r.label()} unprofitable origin")
        self.record("origin_margin", bad)
        self.legs_pay("leg_margin", "all")
        margins = prob.best_simple_margin
        weak = {l for l, m in margins.items() if l != I and m < -self.eps}
        bad = [f"{r.label()} leg {i} node {l}" for r in self.routes for i, l in _tuples(r)
               if l in weak and self.a(r, i, l) > self.flow_eps]
        self.record("unprofitable_nodes_unserved", bad)
        self.record("no_first_leg_cycle",
                    [r.label() for r in self.routes if self.used(r) and has_cycle_in_leg(r, 1)])
        applies = (self.s <= self.total_demand + self.flow_eps and prob.value_of_time > 0
                   and self.a2_strict(margins))
        bad = []
        if applies:
            out: dict[str, float] = {}
            for r in self.routes:
                out[r.origin] = out.get(r.origin, 0.0) + self.f(r)
            for l in self.net.nodes:
                used = out.get(l, 0.0)
                S = self.sol.supply.get(l, 0.0)
                if abs(used - S) > self.flow_eps:
                    bad.append(f"{l}: supply {S:g} but dispatched {used:g}")
                if used > self.net.demand[l] + self.flow_eps:
                    bad.append(f"{l}: dispatched {used:g} above demand")
        self.record("supply_saturation", bad, applies)

    # -- feed-out -----------------------------------------------------------

    def feedout_family(self) -> None:
        prob: FeedOutInstance = self.prob
        I = self.net.interchange
        self.legs_full("feedout_legs_full", 1)
        self.nonnegative_revenue("feedout_nonnegative_revenue")
        self.route_pays("feedout_route_pays")
        self.legs_pay("feedout_leg_margin", "all")
        bad = []
        for r in self.routes:
            if not self.used(r):
                continue
            D, th = r.destination, r.n_legs
            if D == I:
                bad.append(f"{r.label()} ends at the interchange")
                continue
            if self.beta(r, th, D) < r.leg(th).cost - self.eps:
                bad.append(f"{r.label()} unprofitable destination")
            if abs(self.a(r, th, D) - self.f(r)) > self.flow_eps:
                bad.append(f"{r.label()} destination allocation differs from flow")
        self.record("filled_at_destination", bad)
        self.record("no_final_leg_cycle",
                    [r.label() for r in self.routes if self.used(r) and has_cycle_in_leg(r, r.n_legs)])
        margins = prob.best_simple_margin
        strict = prob.value_of_time > 0 and self.a2_strict(margins)
        total = sum(self.f(r) for r in self.routes)
        applies = self.s <= self.total_demand + self.flow_eps and strict
        bad = [f"dispatched {total:g} of {self.s:g}"] if applies and abs(total - self.s) > self.flow_eps else []
        self.record("feedout_supply_saturation", bad, applies)
        applies = self.s >= self.total_demand - self.flow_eps and strict
        bad = []
        if applies:
            for r in self.routes:
                if not self.used(r):
                    continue
                m = self.beta(r, 1, r.destination) - r.total_cost if r.n_legs == 1 else -math.inf
                if m < margins[r.destination] - self.eps:
                    bad.append(f"{r.label()} is not a best single-leg route")
            F = self.sol.node_totals
            for l, d in self.net.demand.items():
                if l != I and abs(F.get(l, 0.0) - d) > self.flow_eps:
                    bad.append(f"{l}: served {F.get(l, 0.0):g} of {d:g}")
        self.record("best_routes_under_ample_supply", bad, applies)


def verify_optimality_properties(sol: FlowSolution, kind: str | None = None) -> Diagnostics:
    """Check the structural properties every optimal plan must have.

    Raises :class:`NotOptimalError` unless the underlying LP solve was optimal.
    """
    kind = kind or sol.kind
    if not sol.is_optimal:
        raise NotOptimalError(f"refusing to diagnose a solution with status {sol.status!r}")
    ck = _Checker(sol)
    if kind in (FEED_IN, SUPPLY_OPT):
        ck.legs_full("secondary_legs_full", 2)
        ck.nonnegative_revenue("nonnegative_revenue")
        ck.route_pays("route_pays")
        ck.legs_pay("secondary_leg_margin", "secondary")
        ck.legs_pay("simple_route_margin", "simple")
        if kind == FEED_IN:
            ck.reduced_only("reduced_routes_only")
        else:
            ck.supply_family()
    elif kind == FEED_OUT:
        ck.feedout_family()
    else:
        raise ValueError(f"unknown problem kind {kind!r}")
    return Diagnostics(kind, ck.checks)
