"""Exact centralized dispatch.

Commitment is solved by exhaustive subset search (instances are small by
construction) and the dispatch of each committed set by bisection on the
shared marginal price: outputs below the price-level set are raised, the
remaining demand is spread over units indifferent at that price.  Start-up
costs are added per committed unit after dispatch.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence, Tuple

from ._search import bisect_transition
from .cost_analysis import ec_min
from .errors import InfeasibleError, SizeError
from .market_model import GeneratorSpec, MarketInstance
from .tolerances import FEASIBILITY_TOL

MAX_GENERATORS = 24

# bisection stop width for the marginal price ($ / MWh)
_LAMBDA_WIDTH = 5e-13


@dataclass(frozen=True)
class ScheduleEntry:
    id: str
    on: bool
    output: float


@dataclass(frozen=True)
class DispatchSolution:
    """Optimal commitment and dispatch for one instance."""

    total_cost: float
    schedule: Tuple[ScheduleEntry, ...]
    committed_set: Tuple[str, ...]
    marginal_lambda: float

    def entry(self, gid: str) -> ScheduleEntry:
        for e in self.schedule:
            if e.id == gid:
                return e
        raise KeyError(gid)


def economic_dispatch(gens: Sequence[GeneratorSpec], demand: float):
    """Least-cost split of demand over committed units.

    Returns ``(outputs, lam)`` with outputs aligned to ``gens`` and lam the
    shared marginal price.  Start-up costs play no role here; every unit in
    ``gens`` is treated as running.
    """
    caps = [g.x_max for g in gens]
    if sum(caps) < demand - FEASIBILITY_TOL:
        raise InfeasibleError(
            f"committed capacity {sum(caps)} below demand {demand}"
        )

    def ceiling(lam: float) -> float:
        return sum(min(g.curve.max_out_at(lam), cap) for g, cap in zip(gens, caps))

    lam_lo = min(g.curve.slope_right(0.0) for g in gens) - 1.0
    lam_hi = max(g.curve.slope_left(g.x_max) for g in gens) + 1.0
    slack = 1e-12 * max(1.0, abs(demand))
    target = min(demand, sum(caps)) - slack
    if ceiling(lam_lo) >= target:
        lam_lo, lam_hi = lam_lo, lam_lo  # degenerate; demand ~ 0
    else:
        lam_lo, lam_hi = bisect_transition(
            lam_lo, lam_hi, lambda lam: ceiling(lam) >= target, width=_LAMBDA_WIDTH
        )

    # base outputs from the low side, headroom from the high side: at a
    # kink-located price this is exactly the optimal allocation box
    base = [min(g.curve.min_out_at(lam_lo), cap) for g, cap in zip(gens, caps)]
    room = [min(g.curve.max_out_at(lam_hi), cap) for g, cap in zip(gens, caps)]
    outputs = list(base)
    residual = demand - sum(base)
    for i in range(len(outputs)):
        if residual <= 0.0:
            break
        add = min(residual, room[i] - outputs[i])
        if add > 0.0:
            outputs[i] += add
            residual -= add
    if residual > FEASIBILITY_TOL:
        raise InfeasibleError(
            f"dispatch left {residual} MW unserved at marginal price {lam_hi}"
        )
    return outputs, 0.5 * (lam_lo + lam_hi)


def _is_lnmgu(gen: GeneratorSpec, demand: float) -> bool:
    # economic minimum above every output the market could ever need
    return ec_min(gen) > min(demand, gen.x_max) + FEASIBILITY_TOL


def solve_primal(instance: MarketInstance) -> DispatchSolution:
    """Globally optimal commitment and dispatch.

    Subsets are searched in (size, id-lexicographic) order and a new
    incumbent must be strictly cheaper, so cost ties resolve to fewer
    committed units, then to the lexicographically first id set.  Subsets
    whose start-up bill alone meets the incumbent are pruned.
    """
    n = len(instance.generators)
    if n > MAX_GENERATORS:
        raise SizeError(f"{n} generators exceed the exhaustive-search limit {MAX_GENERATORS}")
    if instance.total_capacity < instance.demand - FEASIBILITY_TOL:
        raise InfeasibleError(
            f"total capacity {instance.total_capacity} below demand {instance.demand}"
        )

    pool = sorted(instance.generators, key=lambda g: g.id)
    best_cost = float("inf")
    best_combo = None
    best_outputs = None
    best_lambda = 0.0
    for size in range(1, n + 1):
        for combo in itertools.combinations(pool, size):
            startup_bill = sum(g.startup_cost for g in combo)
            if startup_bill >= best_cost:
                continue
            if sum(g.x_max for g in combo) < instance.demand - FEASIBILITY_TOL:
                continue
            outputs, lam = economic_dispatch(combo, instance.demand)
            cost = startup_bill + sum(
                g.curve.value(x) for g, x in zip(combo, outputs)
            )
            if cost < best_cost:
                best_cost = cost
                best_combo = combo
                best_outputs = outputs
                best_lambda = lam
    if best_combo is None:
        raise InfeasibleError("no committable subset can serve demand")

    by_id = {g.id: x for g, x in zip(best_combo, best_outputs)}
    schedule = tuple(
        ScheduleEntry(id=g.id, on=g.id in by_id, output=by_id.get(g.id, 0.0))
        for g in instance.generators
    )
    committed = tuple(e.id for e in schedule if e.on)

    lnmgu_on = sum(
        1 for e in schedule if e.on and _is_lnmgu(instance.generator(e.id), instance.demand)
    )
    assert lnmgu_on <= 1, "optimal commitment ran more than one above-demand-scale unit"

    return DispatchSolution(
        total_cost=best_cost,
        schedule=schedule,
        committed_set=committed,
        marginal_lambda=best_lambda,
    )
