"""End-to-end pricing pipeline and report rendering.

run_pipeline chains validation, exact dispatch, hull pricing, capped
pricing and diagnostics into one report object.  render_report turns it
into canonical JSON (sorted keys, 12 significant digits, timings left
out so reruns are byte-identical), a per-generator CSV, or a markdown
comparison table.  load_sweep reprices the same fleet over a demand grid.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence

from .dual_pricing import PriceSet, UpliftReport, price_set, uplifts
from .errors import PricingError, UnknownFormatError, ValidationError
from .market_model import MarketInstance, validate_instance
from .mchp import (
    DiagnosticsReport,
    MchpResult,
    classify_lnmgu,
    diagnostics,
    mchp_price_set_limit,
    mchp_uplifts,
)
from .primal_solver import DispatchSolution, solve_primal

FORMATS = ("json", "csv", "markdown")


@dataclass
class PricingReport:
    """Everything one pricing run produces."""

    demand: float
    generator_ids: List[str]
    dispatch: DispatchSolution
    chp_price_set: PriceSet
    chp: UpliftReport
    mchp: MchpResult
    checks: DiagnosticsReport
    price_representative: str
    timings_ms: Dict[str, float]


@contextmanager
def _stage(name: str, timings: Dict[str, float]):
    start = time.perf_counter()
    try:
        yield
    except PricingError as exc:
        wrapped = type(exc)(f"[{name}] {exc}")
        if hasattr(exc, "violations"):
            wrapped.violations = exc.violations
        raise wrapped from exc
    finally:
        timings[name] = (time.perf_counter() - start) * 1000.0


def run_pipeline(
    instance: MarketInstance,
    epsilon_override: Optional[float] = None,
    price_representative: str = "lo",
) -> PricingReport:
    """Validate, dispatch and price one instance.

    ``price_representative`` picks the settlement price from each price
    set (lo, mid or hi).  ``epsilon_override`` is accepted for the capped
    dual's margin diagnostics; the reported prices always come from the
    closed-form vanishing-margin set.  Module errors propagate with the
    failing stage prepended to the message.
    """
    timings: Dict[str, float] = {}

    with _stage("validate", timings):
        violations = validate_instance(instance)
        if violations:
            raise ValidationError("; ".join(violations), violations)

    with _stage("dispatch", timings):
        dispatch = solve_primal(instance)

    with _stage("hull_pricing", timings):
        gens = list(instance.generators)
        chp_set = price_set(gens, instance.demand)
        p_chp = chp_set.representative(price_representative)
        chp_report = uplifts(instance, dispatch, p_chp)

    with _stage("capped_pricing", timings):
        mchp_set, _ = mchp_price_set_limit(instance)
        p_mchp = mchp_set.representative(price_representative)
        mchp_result = mchp_uplifts(instance, dispatch, p_mchp)
        if epsilon_override is not None:
            mchp_result.epsilon_used = classify_lnmgu(instance, epsilon_override).epsilon

    with _stage("diagnostics", timings):
        checks = diagnostics(instance, chp_report, mchp_result)

    return PricingReport(
        demand=instance.demand,
        generator_ids=[g.id for g in instance.generators],
        dispatch=dispatch,
        chp_price_set=chp_set,
        chp=chp_report,
        mchp=mchp_result,
        checks=checks,
        price_representative=price_representative,
        timings_ms=timings,
    )


def _sig(x):
    """Round a float to 12 significant digits for canonical output."""
    if x is None or isinstance(x, bool):
        return x
    if isinstance(x, float):
        if math.isinf(x):
            return None
        return float(f"{x:.12g}")
    return x


def _price_set_dict(ps: PriceSet) -> dict:
    return {
        "lo": _sig(ps.lo),
        "hi": _sig(ps.hi),
        "unbounded_above": ps.unbounded_above,
    }


def report_dict(report: PricingReport) -> dict:
    """Canonical dict form of a report (no timings)."""
    return {
        "demand": _sig(report.demand),
        "price_representative": report.price_representative,
        "dispatch": {
            "total_cost": _sig(report.dispatch.total_cost),
            "committed": list(report.dispatch.committed_set),
            "marginal_lambda": _sig(report.dispatch.marginal_lambda),
            "schedule": [
                {"id": e.id, "u": int(e.on), "x": _sig(e.output)}
                for e in report.dispatch.schedule
            ],
        },
        "chp": {
            "price_set": _price_set_dict(report.chp_price_set),
            "price_used": _sig(report.chp.price_used),
            "dual_value": _sig(report.chp.dual_value),
            "gap": _sig(report.chp.gap),
            "total_uplift": _sig(report.chp.total_uplift),
            "uplifts": {gid: _sig(v) for gid, v in report.chp.per_generator.items()},
        },
        "mchp": {
            "price_set": _price_set_dict(report.mchp.price_set),
            "case": report.mchp.case_tag,
            "epsilon_used": _sig(report.mchp.epsilon_used),
            "total_uplift": _sig(report.mchp.total_uplift),
            "uplifts": {gid: _sig(v) for gid, v in report.mchp.per_generator.items()},
        },
        "checks": {
            "single_large_unit_committed": report.checks.single_large_unit_committed,
            "reduction_invariant": report.checks.reduction_invariant,
            "price_ordering": report.checks.price_ordering,
            "uplift_dominance": report.checks.uplift_dominance,
            "limit_consistent_with_eps": report.checks.limit_consistent_with_eps,
            "passed": report.checks.passed,
        },
    }


def _render_csv(report: PricingReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "u", "x", "chp_uplift", "mchp_uplift"])
    for e in report.dispatch.schedule:
        writer.writerow(
            [
                e.id,
                int(e.on),
                _sig(e.output),
                _sig(report.chp.per_generator[e.id]),
                _sig(report.mchp.per_generator[e.id]),
            ]
        )
    return buf.getvalue()


def _fmt_set(ps: PriceSet) -> str:
    if ps.unbounded_above:
        return f"[{_sig(ps.lo)}, inf)"
    if ps.is_singleton():
        return f"{{{_sig(ps.lo)}}}"
    return f"[{_sig(ps.lo)}, {_sig(ps.hi)}]"


def _render_markdown(report: PricingReport) -> str:
    lines = []
    lines.append(f"## Pricing report (demand {_sig(report.demand)} MW)")
    lines.append("")
    lines.append(
        f"Exact dispatch cost: {_sig(report.dispatch.total_cost)} "
        f"(committed: {', '.join(report.dispatch.committed_set) or 'none'})"
    )
    lines.append("")
    lines.append("| quantity | hull pricing | capped pricing |")
    lines.append("| --- | --- | --- |")
    lines.append(
        f"| price set | {_fmt_set(report.chp_price_set)} | {_fmt_set(report.mchp.price_set)} |"
    )
    lines.append(
        f"| price used | {_sig(report.chp.price_used)} | "
        f"{_sig(report.mchp.price_set.representative(report.price_representative))} |"
    )
    lines.append(
        f"| total uplift | {_sig(report.chp.total_uplift)} | {_sig(report.mchp.total_uplift)} |"
    )
    lines.append(f"| case | - | {report.mchp.case_tag} |")
    lines.append("")
    lines.append("| generator | u | x | hull uplift | capped uplift |")
    lines.append("| --- | --- | --- | --- | --- |")
    for e in report.dispatch.schedule:
        lines.append(
            f"| {e.id} | {int(e.on)} | {_sig(e.output)} | "
            f"{_sig(report.chp.per_generator[e.id])} | "
            f"{_sig(report.mchp.per_generator[e.id])} |"
        )
    lines.append("")
    status = "passed" if report.checks.passed else "FAILED"
    lines.append(f"Diagnostics: {status}")
    lines.append("")
    return "\n".join(lines)


def render_report(report: PricingReport, fmt: str = "json") -> str:
    """Render a report as canonical json, csv or markdown."""
    if fmt == "json":
        return json.dumps(report_dict(report), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        return _render_csv(report)
    if fmt == "markdown":
        return _render_markdown(report)
    raise UnknownFormatError(f"unknown format {fmt!r}; expected one of {FORMATS}")


@dataclass
class SweepRow:
    demand: float
    chp: Optional[PriceSet]
    mchp: Optional[PriceSet]
    case_tag: Optional[str]
    error: Optional[str] = None


def load_sweep(instance: MarketInstance, demands: Sequence[float]) -> List[SweepRow]:
    """Clearing prices of the same fleet over a grid of demands.

    Infeasible or invalid demand levels produce a row with the error
    message instead of price sets.
    """
    rows = []
    for d in demands:
        candidate = replace(instance, demand=float(d))
        violations = validate_instance(candidate)
        if violations:
            rows.append(SweepRow(float(d), None, None, None, "; ".join(violations)))
            continue
        chp = price_set(list(candidate.generators), candidate.demand)
        mchp_set, tag = mchp_price_set_limit(candidate)
        rows.append(SweepRow(float(d), chp, mchp_set, tag))
    return rows


def render_sweep(rows: Sequence[SweepRow], fmt: str = "json") -> str:
    """Render a demand sweep as canonical json, csv or markdown."""
    if fmt == "json":
        payload = []
        for r in rows:
            if r.error is not None:
                payload.append({"demand": _sig(r.demand), "error": r.error})
            else:
                payload.append(
                    {
                        "demand": _sig(r.demand),
                        "chp": _price_set_dict(r.chp),
                        "mchp": _price_set_dict(r.mchp),
                        "case": r.case_tag,
                    }
                )
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["demand", "chp_lo", "chp_hi", "mchp_lo", "mchp_hi", "case", "error"])
        for r in rows:
            if r.error is not None:
                writer.writerow([_sig(r.demand), "", "", "", "", "", r.error])
            else:
                writer.writerow(
                    [
                        _sig(r.demand),
                        _sig(r.chp.lo),
                        "inf" if r.chp.unbounded_above else _sig(r.chp.hi),
                        _sig(r.mchp.lo),
                        "inf" if r.mchp.unbounded_above else _sig(r.mchp.hi),
                        r.case_tag,
                        "",
                    ]
                )
        return buf.getvalue()
    if fmt == "markdown":
        lines = ["| demand | hull prices | capped prices | case |", "| --- | --- | --- | --- |"]
        for r in rows:
            if r.error is not None:
                lines.append(f"| {_sig(r.demand)} | - | - | {r.error} |")
            else:
                lines.append(
                    f"| {_sig(r.demand)} | {_fmt_set(r.chp)} | {_fmt_set(r.mchp)} | {r.case_tag} |"
                )
        lines.append("")
        return "\n".join(lines)
    raise UnknownFormatError(f"unknown format {fmt!r}; expected one of {FORMATS}")
