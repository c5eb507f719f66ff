"""Reduced-uplift pricing via capacity-capped duals.

A generator whose minimal economic output exceeds every output the market
could ever ask of it (its capacity exceeds demand and its average cost is
still falling at demand) distorts hull-based prices downward: the price
must make room for output levels that can never be scheduled.  Capping
such units at demand (plus a vanishing margin) in the dual removes the
distortion, raises the clearing price and shrinks total uplift, while
every other generator keeps its full capacity.

Only the capped unit with the lowest average total cost at the cap ever
binds, so at most one such unit is retained in the capped dual; the rest
can be dropped without moving the price set.  In the vanishing-margin
limit the price set has a closed form built from the capped units'
average total cost at demand and the clearing prices of the remaining
fleet.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .cost_analysis import average_total_cost, cost_eval, ec_min, profit
from .dual_pricing import PriceSet, UpliftReport, dual_value, price_set
from .errors import DomainError, StalePriceError
from .market_model import GeneratorSpec, MarketInstance
from .primal_solver import DispatchSolution, solve_primal
from .tolerances import FEASIBILITY_TOL, STALE_PRICE_TOL

# case tags for the vanishing-margin price set
CASE_NO_LNMGU = "no_lnmgu"
CASE_LNMGU_MARGINAL = "lnmgu_marginal"
CASE_INTERVAL_UPPER_CAPPED = "interval_upper_capped"
CASE_LNMGU_IRRELEVANT = "lnmgu_irrelevant"

_ENDPOINT_TOL = 1e-9


@dataclass(frozen=True)
class ContractBounds:
    """Output range each generator could ever be scheduled for.

    cmin = max(demand - sum of the others' capacity, 0) and
    cmax = min(demand, capacity).  Only cmax matters for pricing; cmin is
    reported for completeness and never constrains the dual.
    """

    by_generator: Dict[str, Tuple[float, float]]


@dataclass(frozen=True)
class LnmguPartition:
    """Split of the fleet around demand scale at margin epsilon.

    ``large`` holds ids whose minimal economic output exceeds their
    contract cap (all of them necessarily have capacity above demand);
    ``regular`` holds the rest.  ``min_avg_id`` is the large unit with the
    lowest average total cost at demand + epsilon, the only one that can
    bind in the capped dual.  ``epsilon`` is the margin actually used
    after auto-shrinking below the smallest large-unit headroom.
    """

    large: Tuple[str, ...]
    regular: Tuple[str, ...]
    min_avg_id: Optional[str]
    epsilon: float


@dataclass
class MchpResult:
    """Vanishing-margin capped-dual prices and their settlement."""

    price_set: PriceSet
    case_tag: str
    per_generator: Dict[str, float]
    total_uplift: float
    epsilon_used: float


@dataclass
class DiagnosticsReport:
    """Structural checks tying exact dispatch, hull prices and capped prices."""

    single_large_unit_committed: bool
    reduction_invariant: bool
    price_ordering: bool
    uplift_dominance: bool
    limit_consistent_with_eps: bool

    @property
    def passed(self) -> bool:
        return (
            self.single_large_unit_committed
            and self.reduction_invariant
            and self.price_ordering
            and self.uplift_dominance
            and self.limit_consistent_with_eps
        )


def contract_bounds(instance: MarketInstance) -> ContractBounds:
    total = instance.total_capacity
    d = instance.demand
    by = {}
    for g in instance.generators:
        others = total - g.x_max
        by[g.id] = (max(d - others, 0.0), min(d, g.x_max))
    return ContractBounds(by_generator=by)


def default_epsilon(instance: MarketInstance) -> float:
    """Margin used for numeric cross-checks of the analytic limit."""
    return 1e-6 * instance.demand


def classify_lnmgu(instance: MarketInstance, epsilon: float) -> LnmguPartition:
    """Partition the fleet and pick the binding capped unit.

    ``epsilon`` must be positive; it is shrunk to half the smallest
    large-unit headroom (minimal economic output minus demand) whenever it
    would reach that headroom, so demand + epsilon always sits strictly
    inside every large unit's uneconomic range.
    """
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    d = instance.demand
    bounds = contract_bounds(instance)
    large: List[str] = []
    regular: List[str] = []
    for g in instance.generators:
        cmax = bounds.by_generator[g.id][1]
        if ec_min(g) > cmax + FEASIBILITY_TOL:
            large.append(g.id)
        else:
            regular.append(g.id)

    eps_used = epsilon
    if large:
        headroom = min(ec_min(instance.generator(gid)) - d for gid in large)
        if epsilon >= headroom:
            eps_used = 0.5 * headroom

    min_avg_id = None
    if large:
        best = None
        for gid in sorted(large):
            avg = average_total_cost(instance.generator(gid), d + eps_used)
            if best is None or avg < best - 0.0:
                best = avg
                min_avg_id = gid
    return LnmguPartition(
        large=tuple(large), regular=tuple(regular), min_avg_id=min_avg_id, epsilon=eps_used
    )


def eps_dual_system(instance: MarketInstance, epsilon: float):
    """Generators and caps of the capped dual at margin epsilon.

    Regular units keep full capacity; the binding large unit is capped at
    demand + epsilon; the remaining large units are dropped.  Returns
    ``(gens, caps, partition)``.
    """
    part = classify_lnmgu(instance, epsilon)
    gens = []
    caps = []
    for g in instance.generators:
        if g.id in part.large:
            if g.id == part.min_avg_id:
                gens.append(g)
                caps.append(instance.demand + part.epsilon)
        else:
            gens.append(g)
            caps.append(g.x_max)
    return gens, caps, part


def mchp_price_set_eps(instance: MarketInstance, epsilon: float) -> PriceSet:
    """Clearing prices of the capped dual at a positive margin."""
    gens, caps, part = eps_dual_system(instance, epsilon)
    if not part.large:
        return price_set(list(instance.generators), instance.demand)
    return price_set(gens, caps=caps, demand=instance.demand)


def mchp_price_set_limit(instance: MarketInstance) -> Tuple[PriceSet, str]:
    """Vanishing-margin clearing prices, in closed form.

    With no large units this is the ordinary price set.  Otherwise let
    p_bar be the cheapest large unit's average total cost at demand and
    P_red the price set of the regular fleet alone:

    - regular fleet cannot serve demand: the set is {p_bar}, a large unit
      is marginal;
    - P_red lies entirely below p_bar: the large units are priced out and
      the set is P_red;
    - P_red straddles p_bar: the set is P_red truncated above at p_bar;
    - P_red lies at or above p_bar: the set collapses to {p_bar}.
    """
    part = classify_lnmgu(instance, default_epsilon(instance))
    gens = list(instance.generators)
    d = instance.demand
    if not part.large:
        return price_set(gens, d), CASE_NO_LNMGU

    p_bar = min(
        average_total_cost(instance.generator(gid), d) for gid in part.large
    )
    regulars = [g for g in gens if g.id in set(part.regular)]
    regular_cap = sum(g.x_max for g in regulars)
    if not regulars or regular_cap < d - FEASIBILITY_TOL:
        return PriceSet(lo=p_bar, hi=p_bar, unbounded_above=False), CASE_LNMGU_MARGINAL

    reduced = price_set(regulars, d)
    if not reduced.unbounded_above and reduced.hi < p_bar - _ENDPOINT_TOL:
        return reduced, CASE_LNMGU_IRRELEVANT
    if reduced.lo >= p_bar - _ENDPOINT_TOL:
        return PriceSet(lo=p_bar, hi=p_bar, unbounded_above=False), CASE_LNMGU_MARGINAL
    return (
        PriceSet(lo=reduced.lo, hi=p_bar, unbounded_above=False),
        CASE_INTERVAL_UPPER_CAPPED,
    )


def mchp_uplifts(instance: MarketInstance, dispatch: DispatchSolution, p: float) -> MchpResult:
    """Settle the exact schedule at a capped-dual price.

    Profits are evaluated with every large unit capped at demand, so the
    price can rise to p_bar without creating a lost-profit claim for
    output the market could never absorb.  Uplifts stay nonnegative and
    never exceed their hull-price counterparts in total; at the limit
    price no large unit retains positive capped profit.
    """
    limit_set, tag = mchp_price_set_limit(instance)
    if not limit_set.contains(p, tol=STALE_PRICE_TOL):
        raise StalePriceError(
            f"price {p} is outside the capped clearing set [{limit_set.lo}, "
            f"{'inf' if limit_set.unbounded_above else limit_set.hi}]"
        )
    part = classify_lnmgu(instance, default_epsilon(instance))
    large = set(part.large)
    per: Dict[str, float] = {}
    for g in instance.generators:
        cap = min(instance.demand, g.x_max) if g.id in large else g.x_max
        entry = dispatch.entry(g.id)
        best = profit(g, p, cap).value
        actual = p * entry.output - cost_eval(g, entry.output, entry.on)
        per[g.id] = best - actual
    return MchpResult(
        price_set=limit_set,
        case_tag=tag,
        per_generator=per,
        total_uplift=sum(per.values()),
        epsilon_used=part.epsilon,
    )


def _caps_all_large_capped(instance: MarketInstance, part: LnmguPartition):
    gens = list(instance.generators)
    caps = [
        instance.demand + part.epsilon if g.id in set(part.large) else g.x_max
        for g in gens
    ]
    return gens, caps


def diagnostics(
    instance: MarketInstance, chp_report: UpliftReport, mchp_result: MchpResult
) -> DiagnosticsReport:
    """Cross-checks between exact dispatch, hull prices and capped prices.

    Recomputes the exact schedule internally, so it can run from a report
    alone.  All checks hold for every valid instance; a failure points at
    a numerics bug, not at the input.
    """
    d = instance.demand
    part = classify_lnmgu(instance, default_epsilon(instance))
    dispatch = solve_primal(instance)

    large = set(part.large)
    committed_large = sum(1 for e in dispatch.schedule if e.on and e.id in large)
    single_large = committed_large <= 1

    # dropping all non-binding large units must not move the eps price set
    if part.large:
        kept = mchp_price_set_eps(instance, part.epsilon)
        gens_all, caps_all = _caps_all_large_capped(instance, part)
        full = price_set(gens_all, d, caps_all)
        reduction_ok = abs(kept.lo - full.lo) <= _ENDPOINT_TOL and (
            kept.unbounded_above == full.unbounded_above
            if (kept.unbounded_above or full.unbounded_above)
            else abs(kept.hi - full.hi) <= _ENDPOINT_TOL
        )
    else:
        reduction_ok = True

    # capped prices sit inside the hull price set or strictly above it
    hull_set = price_set(list(instance.generators), d)
    endpoints = [mchp_result.price_set.lo]
    if not mchp_result.price_set.unbounded_above:
        endpoints.append(mchp_result.price_set.hi)
    ordering_ok = all(
        hull_set.contains(e, tol=_ENDPOINT_TOL) or e > hull_set.hi for e in endpoints
    )

    dominance_ok = mchp_result.total_uplift <= chp_report.total_uplift + 1e-6

    # the closed-form limit must agree with a small positive margin
    if part.large:
        eps_set = mchp_price_set_eps(instance, default_epsilon(instance))
        limit = mchp_result.price_set
        lo_ok = abs(eps_set.lo - limit.lo) <= 1e-4
        if limit.unbounded_above or eps_set.unbounded_above:
            hi_ok = True
        else:
            hi_ok = abs(eps_set.hi - limit.hi) <= 1e-4
        limit_ok = lo_ok and hi_ok
    else:
        limit_ok = True

    return DiagnosticsReport(
        single_large_unit_committed=single_large,
        reduction_invariant=reduction_ok,
        price_ordering=ordering_ok,
        uplift_dominance=dominance_ok,
        limit_consistent_with_eps=limit_ok,
    )
