"""Offline route elimination.

Each leg gets a score ``w = max(0, best operator revenue on the leg) - leg cost``.
Routes whose legs cannot pay for themselves are never used by any optimal
feeder plan, whatever the demand and supply, so they can be dropped before
any LP is built.  The rules look only at route metadata.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .pricing import PriceTable
from .routes import Route, has_cycle_in_leg, map_route_reverse

INCLUDE_TOL = 1e-12  # borderline scores round toward keeping the route


def leg_score(route: Route, i: int, prices: PriceTable) -> float:
    best = max((sp.revenue for sp in prices.leg(route, i)), default=0.0)
    return max(best, 0.0) - route.leg(i).cost


@dataclass(frozen=True)
class ReducedSet:
    simple: tuple[Route, ...]  # single-leg routes with a nonnegative score
    multi: tuple[Route, ...]  # multi-leg routes passing the leg tests

    @property
    def routes(self) -> tuple[Route, ...]:
        return tuple(sorted(self.simple + self.multi, key=lambda r: r.rid))

    def __len__(self) -> int:
        return len(self.simple) + len(self.multi)


def _keeps(route: Route, prices: PriceTable) -> bool:
    scores = [leg_score(route, i, prices) for i in range(1, route.n_legs + 1)]
    if route.n_legs == 1:
        return scores[0] >= -INCLUDE_TOL
    return sum(scores) >= -INCLUDE_TOL and all(w >= -INCLUDE_TOL for w in scores[1:])


def reduce_feedin_sets(routes: Iterable[Route], prices: PriceTable) -> ReducedSet:
    simple, multi = [], []
    for r in routes:
        if _keeps(r, prices):
            (simple if r.n_legs == 1 else multi).append(r)
    return ReducedSet(tuple(simple), tuple(multi))


def reduce_feedin(routes: Iterable[Route], prices: PriceTable) -> list[Route]:
    """Routes that may carry flow in some optimal feed-in plan."""
    return list(reduce_feedin_sets(routes, prices).routes)


def reduce_supplyopt(reduced: Iterable[Route], prices: PriceTable) -> list[Route]:
    """Further pruning once supply placement is itself a decision.

    Keeps routes that do not start at the interchange, earn at least their
    first-leg cost at the origin, and have no repeated node in the first leg.
    """
    out = []
    for r in reduced:
        if r.origin == r.interchange or has_cycle_in_leg(r, 1):
            continue
        origin_rev = prices.revenue(r, 1, r.origin)
        if origin_rev >= r.leg(1).cost - INCLUDE_TOL:
            out.append(r)
    return out


def reduce_feedout(feedout_routes: Iterable[Route], reversed_reduced: Iterable[Route]) -> list[Route]:
    """Feed-out routes whose reversal is in the reduced supply-optimisation set."""
    keep = {r.nodes for r in reversed_reduced}
    return [r for r in feedout_routes if map_route_reverse(r).nodes in keep]


@dataclass(frozen=True)
class PruningStats:
    all_routes: int
    reduced: int
    simple: int
    multi: int
    supply_reduced: int

    def as_dict(self) -> dict[str, int]:
        return {"R": self.all_routes, "R_bar": self.reduced, "R1": self.simple,
                "R2": self.multi, "R_minus": self.supply_reduced}


def pruning_stats(routes: Sequence[Route], prices: PriceTable) -> PruningStats:
    sets = reduce_feedin_sets(routes, prices)
    minus = reduce_supplyopt(sets.routes, prices)
    return PruningStats(len(routes), len(sets), len(sets.simple), len(sets.multi), len(minus))


def saturation_check(reduced_by_window: dict[float, Sequence[Route]]) -> bool:
    """True when the reduced sets computed at several time windows coincide."""
    sets = [frozenset(r.nodes for r in rs) for rs in reduced_by_window.values()]
    return all(s == sets[0] for s in sets[1:])
