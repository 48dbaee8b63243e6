"""Independent reference implementation for cross-checking the main pipeline.

Everything here is deliberately naive: routes come from an exhaustive walk
search without pruning, perceived costs are minimised over every walk, and
the LPs are assembled separately over the full route set and solved in exact
rational arithmetic.  Nothing here calls the reduction rules or the
floating-point solver.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .lp import LE, LinearProgram, LpSolution, solve_exact
from .network import Edge, Instance, Network

Walk = tuple[str, ...]


class GenerationError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# random instances


@dataclass(frozen=True)
class InstanceRecipe:
    seed: int = 0
    n_nodes: int = 4  # including the interchange
    edge_density: float = 0.5
    rho_range: tuple[int, int] = (1, 4)
    time_range: tuple[int, int] = (2, 6)
    demand_range: tuple[int, int] = (0, 250)
    supply_range: tuple[int, int] = (0, 250)
    time_window_range: tuple[int, int] | None = None  # default: one to four longest edge times
    value_of_time: float = 1.0
    price_mode: str = "b"  # "b" or "explicit"
    cost_factor: float = 2.5
    eta_range: tuple[int, int] = (2, 20)
    zeta_range: tuple[int, int] = (0, 20)
    max_routes: int = 5000

    def __post_init__(self) -> None:
        if not 2 <= self.n_nodes <= 26:
            raise ValueError("node count must be between 2 and 26")
        if not 0 < self.edge_density <= 1:
            raise ValueError("edge density must be in (0, 1]")
        for name in ("rho_range", "time_range", "eta_range"):
            lo, hi = getattr(self, name)
            if not 0 < lo <= hi:
                raise ValueError(f"{name} must be a positive range")
        for name in ("demand_range", "supply_range", "zeta_range"):
            lo, hi = getattr(self, name)
            if not 0 <= lo <= hi:
                raise ValueError(f"{name} must be a nonnegative range")
        if self.price_mode not in ("b", "explicit"):
            raise ValueError("price mode must be 'b' or 'explicit'")

    def as_dict(self) -> dict:
        return asdict(self)


def _draw(rng: np.random.Generator, rng_range: tuple[int, int]) -> int:
    lo, hi = rng_range
    return int(rng.integers(lo, hi + 1))


def _attempt(recipe: InstanceRecipe, rng: np.random.Generator) -> Instance:
    names = [chr(ord("A") + k) for k in range(recipe.n_nodes - 1)] + ["I"]
    edges = []
    for u in names:
        for v in names:
            if u != v and rng.random() < recipe.edge_density:
                edges.append(Edge(u, v, float(_draw(rng, recipe.rho_range)), float(_draw(rng, recipe.time_range))))
    demand = {l: float(_draw(rng, recipe.demand_range)) for l in names[:-1]}
    supply = {l: float(_draw(rng, recipe.supply_range)) for l in names}
    net = Network(tuple(names), "I", tuple(edges), demand, supply)
    if recipe.time_window_range is None:
        longest = max((e.time for e in edges), default=recipe.time_range[1])
        lo, hi = int(longest), int(4 * longest)
    else:
        lo, hi = recipe.time_window_range
    T = float(rng.integers(lo, hi + 1))
    alpha = recipe.value_of_time
    if recipe.price_mode == "b":
        return Instance(net, T, alpha, cost_factor=recipe.cost_factor)
    table = {l: (float(_draw(rng, recipe.eta_range)), float(_draw(rng, recipe.zeta_range))) for l in names[:-1]}
    return Instance(net, T, alpha, alt_transport=table)


def generate(recipe: InstanceRecipe, attempts: int = 100) -> Instance:
    """Deterministic random instance with at least one feed-in route and at most ``max_routes``."""
    rng = np.random.default_rng(recipe.seed)
    for _ in range(attempts):
        inst = _attempt(recipe, rng)
        count = count_walks(inst.network, inst.time_window, limit=recipe.max_routes + 1)
        if 0 < count <= recipe.max_routes:
            return inst
    raise GenerationError(f"no feasible routes within the route limit after {attempts} attempts "
                          f"(seed {recipe.seed})")


def battery(n: int, base: InstanceRecipe | None = None, first_seed: int = 0) -> Iterator[tuple[int, Instance]]:
    """``n`` instances from consecutive seeds.

    Size, density, cost factor and price mode cycle with the seed so that the
    battery mixes small and large route sets, cheap and expensive
    alternatives, and explicit price tables.
    """
    base = base or InstanceRecipe()
    for k in range(n):
        seed = first_seed + k
        recipe = replace(base, seed=seed, n_nodes=3 + seed % 4, edge_density=(0.35, 0.5, 0.7)[seed % 3],
                         cost_factor=(2.5, 4.0, 1.5, 6.0)[(seed // 4) % 4],
                         price_mode="explicit" if seed % 5 == 4 else base.price_mode)
        yield seed, generate(recipe)


# ---------------------------------------------------------------------------
# naive walks


def _walks_from(net: Network, start: str, T: Fraction) -> Iterator[tuple[Walk, Fraction]]:
    out: dict[str, list[Edge]] = {}
    for e in net.edges:
        out.setdefault(e.tail, []).append(e)
    stack = [((start,), Fraction(0))]
    while stack:
        walk, t = stack.pop()
        if len(walk) > 1:
            yield walk, t
        for e in out.get(walk[-1], []):
            t2 = t + Fraction(e.time)
            if t2 <= T:
                stack.append((walk + (e.head,), t2))


def naive_feedin_walks(net: Network, T) -> set[Walk]:
    T = Fraction(T)
    return {w for l in net.nodes for w, _ in _walks_from(net, l, T) if w[-1] == net.interchange}


def naive_feedout_walks(net: Network, T) -> set[Walk]:
    return {w for w, _ in _walks_from(net, net.interchange, Fraction(T))}


def count_walks(net: Network, T, limit: int) -> int:
    n = 0
    for l in net.nodes:
        for w, _ in _walks_from(net, l, Fraction(T)):
            if w[-1] == net.interchange:
                n += 1
                if n >= limit:
                    return n
    return n


# ---------------------------------------------------------------------------
# exact prices


def _edge_table(net: Network) -> dict[tuple[str, str], tuple[Fraction, Fraction]]:
    return {(e.tail, e.head): (Fraction(e.rho), Fraction(e.time)) for e in net.edges}


def exact_perceived_costs(inst: Instance, toward_interchange: bool = True) -> dict[str, Fraction]:
    """``g_l`` for every node, minimised over all walks without an interior interchange visit.

    ``toward_interchange=False`` evaluates trips from the interchange to each
    node (the feed-out alternative).
    """
    net = inst.network
    I = net.interchange
    alpha = Fraction(inst.value_of_time)
    if inst.alt_transport is not None:
        g = {l: alpha * Fraction(eta) + Fraction(zeta) for l, (eta, zeta) in inst.alt_transport.items()}
        g[I] = Fraction(0)
        return g
    b = Fraction(inst.cost_factor)
    emap = _edge_table(net)
    T = Fraction(inst.time_window)
    g: dict[str, Fraction] = {I: Fraction(0)}
    if toward_interchange:
        walks = [(w, t) for l in net.nodes if l != I for w, t in _walks_from(net, l, T)
                 if w[-1] == I and I not in w[:-1]]
        key = lambda w: w[0]  # noqa: E731
    else:
        walks = [(w, t) for w, t in _walks_from(net, I, T) if I not in w[1:]]
        key = lambda w: w[-1]  # noqa: E731
    for w, t in walks:
        c = sum(emap[(u, v)][0] for u, v in zip(w, w[1:]))
        val = alpha * t + b * c
        l = key(w)
        if l not in g or val < g[l]:
            g[l] = val
    return g


def _legs(walk: Walk, I: str) -> list[tuple[int, int]]:
    cuts = [0] + [k for k in range(1, len(walk) - 1) if walk[k] == I] + [len(walk) - 1]
    return list(zip(cuts, cuts[1:]))


def exact_tuples(walk: Walk, I: str, T, emap, g: dict[str, Fraction], alpha, feed_in: bool):
    """Service tuples of ``walk`` as ``(leg, node, revenue)`` in exact arithmetic."""
    arr = [Fraction(0)]
    for u, v in zip(walk, walk[1:]):
        arr.append(arr[-1] + emap[(u, v)][1])
    total = arr[-1]
    T = Fraction(T)
    alpha = Fraction(alpha)
    out = []
    for i, (a, z) in enumerate(_legs(walk, I), start=1):
        span = range(a, z) if feed_in else range(a + 1, z + 1)
        seen: dict[str, int] = {}
        for k in span:
            if feed_in:
                seen[walk[k]] = k  # last visit
            else:
                seen.setdefault(walk[k], k)  # first visit
        for l, k in seen.items():
            if feed_in:
                price = g[l] - alpha * (T - (T - total + arr[k]))
            else:
                price = g[l] - alpha * arr[k]
            out.append((i, l, price - 1))
    return out


def _walk_cost(walk: Walk, emap) -> Fraction:
    return sum((emap[(u, v)][0] for u, v in zip(walk, walk[1:])), Fraction(0))


# ---------------------------------------------------------------------------
# reference LPs


FEED_IN = "feed-in"
SUPPLY_OPT = "supply-opt"
FEED_OUT = "feed-out"


def reference_lp(inst: Instance, kind: str, s=None) -> LinearProgram:
    net = inst.network
    I = net.interchange
    emap = _edge_table(net)
    alpha = Fraction(inst.value_of_time)
    feed_in = kind in (FEED_IN, SUPPLY_OPT)
    if feed_in:
        walks = sorted(naive_feedin_walks(net, inst.time_window))
        g = exact_perceived_costs(inst, True)
    elif kind == FEED_OUT:
        walks = sorted(naive_feedout_walks(net, inst.time_window))
        g = exact_perceived_costs(inst, False)
    else:
        raise ValueError(f"unknown problem kind {kind!r}")
    lp = LinearProgram()
    served: dict[str, dict[int, Fraction]] = {l: {} for l in net.nodes}
    starts: dict[str, dict[int, Fraction]] = {l: {} for l in net.nodes}
    flows = {}
    for w in walks:
        f = lp.add_variable(-_walk_cost(w, emap), ("f", w))
        flows[w] = f
        starts[w[0]][f] = Fraction(1)
        legs: dict[int, dict[int, Fraction]] = {}
        for i, l, rev in exact_tuples(w, I, inst.time_window, emap, g, alpha, feed_in):
            j = lp.add_variable(rev, ("a", w, i, l))
            legs.setdefault(i, {})[j] = Fraction(1)
            served[l][j] = Fraction(1)
        for i, coeffs in legs.items():
            lp.add_row({**coeffs, f: Fraction(-1)}, LE, Fraction(0))
    for l in net.nodes:
        if served[l]:
            lp.add_row(served[l], LE, Fraction(net.demand[l]))
    if kind == FEED_IN:
        for l in net.nodes:
            if starts[l]:
                lp.add_row(starts[l], LE, Fraction(net.supply[l]))
    elif kind == SUPPLY_OPT:
        S = {l: lp.add_variable(Fraction(0), ("S", l)) for l in net.nodes}
        for l in net.nodes:
            if starts[l]:
                lp.add_row({**starts[l], S[l]: Fraction(-1)}, LE, Fraction(0))
        lp.add_row({j: Fraction(1) for j in S.values()}, LE, Fraction(s))
    else:
        lp.add_row({j: Fraction(1) for j in flows.values()}, LE, Fraction(s))
    return lp


def reference_solve(inst: Instance, kind: str, s=None, max_vars: int = 2000) -> Fraction:
    """Exact optimum over the complete route set.

    ``s`` is the total supply for the supply-placement and feed-out problems;
    the feed-in problem uses the per-node supply of the network.
    """
    if kind != FEED_IN and s is None:
        raise ValueError(f"{kind} needs a total supply")
    lp = reference_lp(inst, kind, s)
    sol: LpSolution = solve_exact(lp, max_vars=max_vars)
    if not sol.is_optimal:
        raise RuntimeError(f"reference LP ended with status {sol.status}")
    return sol.objective


# ---------------------------------------------------------------------------
# harness


@dataclass
class HarnessRow:
    seed: int
    kind: str
    routes: int
    reference: float | None
    primary: float
    deviation: float | None
    properties: dict[str, str] = field(default_factory=dict)
    guarded: bool = False


@dataclass
class HarnessReport:
    rows: list[HarnessRow]

    @property
    def max_deviation(self) -> float:
        devs = [r.deviation for r in self.rows if r.deviation is not None]
        return max(devs, default=0.0)

    @property
    def properties_pass(self) -> bool:
        return all(v != "FAIL" for r in self.rows for v in r.properties.values())

    def records(self) -> Iterator[dict]:
        for r in self.rows:
            rec = {k: v for k, v in asdict(r).items() if k != "properties"}
            rec["properties"] = "fail" if "FAIL" in r.properties.values() else "pass"
            yield rec


def relative_gap(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(b))


def paired_run(inst: Instance, seed: int, kinds: Sequence[str] = (FEED_IN, SUPPLY_OPT, FEED_OUT),
               max_vars: int = 2000) -> list[HarnessRow]:
    """Primary pipeline against the exact reference on one instance."""
    from .lp import LpSizeError
    from .problems import FeedInModel, FeedOutModel, solve_feedin, solve_feedout, solve_supplyopt, \
        verify_optimality_properties

    rows = []
    half = inst.network.total_demand / 2
    model = FeedInModel.build(inst)
    for kind in kinds:
        if kind == FEED_IN:
            sol = solve_feedin(model.feedin(model.reduced))
            s = None
        elif kind == SUPPLY_OPT:
            s = half
            sol = solve_supplyopt(model.supplyopt(s))
        else:
            s = half
            sol = solve_feedout(FeedOutModel.build(inst).feedout(s))
        try:
            ref = float(reference_solve(inst, kind, s, max_vars))
            dev = relative_gap(sol.objective, ref)
            guarded = False
        except LpSizeError:
            ref, dev, guarded = None, None, True
        props = verify_optimality_properties(sol).summary()
        rows.append(HarnessRow(seed, kind, len(model.routes), ref, sol.objective, dev, props, guarded))
    return rows


def run_harness(seeds: Sequence[int], base: InstanceRecipe | None = None) -> HarnessReport:
    base = base or InstanceRecipe()
    rows = []
    for seed in seeds:
        inst = generate(replace(base, seed=seed))
        rows.extend(paired_run(inst, seed))
    return HarnessReport(rows)
