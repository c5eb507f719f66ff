"""Market-clearing price sets, dual values and uplift settlement.

The price set is where the aggregate profit-maximizing supply meets
demand.  Aggregate supply is a sum of per-generator intervals that grows
with price, so both endpoints come out of monotone bisection: the lower
endpoint is the first price whose best-case supply covers demand, the
upper endpoint the last price whose worst-case supply does not exceed it.

The dual value at a price p is p*d minus total price-taker profit; its
gap to the exact dispatch cost equals the total uplift paid when
settling at p, generator by generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

from ._search import bisect_transition
from .cost_analysis import Interval, average_total_cost, cost_eval, profit, supply_correspondence
from .errors import InfeasibleError, NoCrossingError, StalePriceError
from .market_model import GeneratorSpec, MarketInstance
from .primal_solver import DispatchSolution
from .tolerances import FEASIBILITY_TOL, STALE_PRICE_TOL

# bisection stop width for price endpoints ($ / MWh)
_PRICE_WIDTH = 5e-13


@dataclass(frozen=True)
class PriceSet:
    """Closed interval of market-clearing prices.

    ``unbounded_above`` marks the ray case (capacity exactly equals
    demand); ``hi`` is +inf there.
    """

    lo: float
    hi: float
    unbounded_above: bool = False

    def is_singleton(self, tol: float = 1e-9) -> bool:
        return not self.unbounded_above and self.hi - self.lo <= tol

    def contains(self, p: float, tol: float = 0.0) -> bool:
        if p < self.lo - tol:
            return False
        return self.unbounded_above or p <= self.hi + tol

    def representative(self, kind: str = "lo") -> float:
        """A concrete settlement price: lo, mid or hi of the set.

        The ray case has no finite mid or hi, so everything falls back to
        the lower endpoint there.
        """
        if kind not in ("lo", "mid", "hi"):
            raise ValueError(f"unknown representative {kind!r}")
        if self.unbounded_above or kind == "lo":
            return self.lo
        if kind == "mid":
            return 0.5 * (self.lo + self.hi)
        return self.hi


@dataclass
class UpliftReport:
    """Settlement at one price: per-generator make-whole payments."""

    price_used: float
    per_generator: Dict[str, float]
    total_uplift: float
    dual_value: float
    gap: float


def _resolve_caps(gens: Sequence[GeneratorSpec], caps: Optional[Sequence[float]]):
    if caps is None:
        return [g.x_max for g in gens]
    return list(caps)


def aggregate_supply(
    gens: Sequence[GeneratorSpec], p: float, caps: Optional[Sequence[float]] = None
) -> Interval:
    """Sum of all generators' optimal output ranges at price p."""
    caps = _resolve_caps(gens, caps)
    lo = 0.0
    hi = 0.0
    for g, cap in zip(gens, caps):
        s = supply_correspondence(g, p, cap)
        lo += s.lo
        hi += s.hi
    return Interval(lo, hi)


def _price_upper_bound(gens, caps) -> float:
    worst_avg = max(average_total_cost(g, cap) for g, cap in zip(gens, caps))
    worst_marginal = max(g.curve.slope_left(cap) for g, cap in zip(gens, caps))
    return worst_avg + worst_marginal + 1.0


def price_set(
    gens: Sequence[GeneratorSpec], demand: float, caps: Optional[Sequence[float]] = None
) -> PriceSet:
    """All prices at which aggregate supply can clear demand."""
    caps = _resolve_caps(gens, caps)
    total = sum(caps)
    if total < demand - FEASIBILITY_TOL:
        raise InfeasibleError(f"total capacity {total} below demand {demand}")

    slack = 1e-10 * max(1.0, abs(demand))
    p_ub = _price_upper_bound(gens, caps)

    def hi_at(p: float) -> float:
        return aggregate_supply(gens, p, caps).hi

    def lo_at(p: float) -> float:
        return aggregate_supply(gens, p, caps).lo

    if hi_at(p_ub) < demand - slack:
        raise NoCrossingError(
            f"supply never reaches demand {demand} below price {p_ub}"
        )
    if hi_at(0.0) >= demand - slack:
        lower = 0.0
    else:
        _, lower = bisect_transition(
            0.0, p_ub, lambda p: hi_at(p) >= demand - slack, width=_PRICE_WIDTH
        )

    if total <= demand + max(FEASIBILITY_TOL, slack):
        # at full output the market only just covers demand; every higher
        # price still clears
        return PriceSet(lo=lower, hi=math.inf, unbounded_above=True)

    upper, _ = bisect_transition(
        lower, p_ub, lambda p: lo_at(p) > demand + slack, width=_PRICE_WIDTH
    )
    return PriceSet(lo=lower, hi=max(upper, lower), unbounded_above=False)


def dual_value(
    gens: Sequence[GeneratorSpec],
    demand: float,
    p: float,
    caps: Optional[Sequence[float]] = None,
) -> float:
    """p * demand minus total price-taker profit at p."""
    caps = _resolve_caps(gens, caps)
    return p * demand - sum(profit(g, p, cap).value for g, cap in zip(gens, caps))


def uplifts(
    instance: MarketInstance,
    dispatch: DispatchSolution,
    p: float,
    caps: Optional[Sequence[float]] = None,
) -> UpliftReport:
    """Make-whole payments when the exact schedule settles at price p.

    Each generator is paid the difference between its best profit at p and
    the profit its scheduled output actually earns, so following the
    schedule is never worse than self-scheduling.  The price must lie in
    (or within STALE_PRICE_TOL of) the current price set.
    """
    gens = instance.generators
    ps = price_set(gens, instance.demand, caps)
    if not ps.contains(p, tol=STALE_PRICE_TOL):
        raise StalePriceError(
            f"price {p} is outside the clearing set [{ps.lo}, "
            f"{'inf' if ps.unbounded_above else ps.hi}]"
        )
    caps = _resolve_caps(gens, caps)
    per = {}
    for g, cap in zip(gens, caps):
        entry = dispatch.entry(g.id)
        best = profit(g, p, cap).value
        actual = p * entry.output - cost_eval(g, entry.output, entry.on)
        per[g.id] = best - actual
    vd = dual_value(gens, instance.demand, p, caps)
    total = sum(per.values())
    return UpliftReport(
        price_used=p,
        per_generator=per,
        total_uplift=total,
        dual_value=vd,
        gap=dispatch.total_cost - vd,
    )
