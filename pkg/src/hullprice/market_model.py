"""Market data model: cost curves, generators, instances, JSON interchange.

An instance is one period of a single-node power market: a fixed demand in
MW and a list of generators.  Each generator has a nonnegative start-up
cost, a convex nondecreasing variable-cost curve starting at c(0) = 0, and
a capacity limit.  Curves are piecewise linear or quadratic, which keeps
every downstream computation (marginal cost ranges, level sets, conjugates)
in closed form.

JSON schema::

    {"demand": number,
     "generators": [{"id": str,
                     "w": number,
                     "curve": {"linear": a}
                            | {"quadratic": {"a": a, "q": q}}
                            | {"pwl": [[x1, s1], [x2, s2], ...]},
                     "x_max": number}]}

PWL pairs are (segment right endpoint, slope), contiguous from 0; the last
endpoint must equal x_max.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

from .errors import SchemaError, ValidationError
from .tolerances import FEASIBILITY_TOL, boundary_tol


@dataclass(frozen=True)
class Linear:
    """c(x) = a * x on [0, domain_max]."""

    a: float
    domain_max: float

    def value(self, x: float) -> float:
        return self.a * x

    def slope_right(self, x: float) -> float:
        return self.a

    def slope_left(self, x: float) -> float:
        return self.a

    def max_out_at(self, lam: float) -> float:
        # largest x with left marginal cost <= lam
        return self.domain_max if lam >= self.a else 0.0

    def min_out_at(self, lam: float) -> float:
        # smallest x with right marginal cost >= lam
        return 0.0 if self.a >= lam else self.domain_max

    def json_form(self):
        return {"linear": self.a}


@dataclass(frozen=True)
class Quadratic:
    """c(x) = a*x + (q/2)*x^2 on [0, domain_max]; marginal cost a + q*x."""

    a: float
    q: float
    domain_max: float

    def value(self, x: float) -> float:
        return self.a * x + 0.5 * self.q * x * x

    def slope_right(self, x: float) -> float:
        return self.a + self.q * x

    def slope_left(self, x: float) -> float:
        return self.a + self.q * x

    def max_out_at(self, lam: float) -> float:
        if self.q == 0.0:
            return self.domain_max if lam >= self.a else 0.0
        return min(max((lam - self.a) / self.q, 0.0), self.domain_max)

    def min_out_at(self, lam: float) -> float:
        if self.q == 0.0:
            return 0.0 if self.a >= lam else self.domain_max
        return min(max((lam - self.a) / self.q, 0.0), self.domain_max)

    def json_form(self):
        return {"quadratic": {"a": self.a, "q": self.q}}


@dataclass(frozen=True)
class PiecewiseLinear:
    """Contiguous linear segments from 0: ((right endpoint, slope), ...).

    Segment k covers (x_{k-1}, x_k] with constant slope s_k; valid curves
    have ascending endpoints and nondecreasing nonnegative slopes.
    """

    segments: tuple

    @property
    def domain_max(self) -> float:
        return self.segments[-1][0]

    def value(self, x: float) -> float:
        total = 0.0
        left = 0.0
        for right, slope in self.segments:
            if x <= right:
                return total + slope * (x - left)
            total += slope * (right - left)
            left = right
        return total

    def slope_right(self, x: float) -> float:
        # at interior kinks: slope of the next segment; at domain_max: last slope
        for right, slope in self.segments:
            if x < right:
                return slope
        return self.segments[-1][1]

    def slope_left(self, x: float) -> float:
        # at 0 there is no left slope; return the first segment's
        for right, slope in self.segments:
            if x <= right:
                return slope
        return self.segments[-1][1]

    def max_out_at(self, lam: float) -> float:
        out = 0.0
        for right, slope in self.segments:
            if slope <= lam:
                out = right
            else:
                break
        return out

    def min_out_at(self, lam: float) -> float:
        left = 0.0
        for right, slope in self.segments:
            if slope >= lam:
                return left
            left = right
        return self.domain_max

    def json_form(self):
        return {"pwl": [[right, slope] for right, slope in self.segments]}


CostCurve = Union[Linear, Quadratic, PiecewiseLinear]


@dataclass(frozen=True)
class GeneratorSpec:
    """One generator: id, start-up cost w, variable-cost curve, capacity."""

    id: str
    startup_cost: float
    curve: CostCurve
    x_max: float


@dataclass(frozen=True)
class MarketInstance:
    demand: float
    generators: tuple

    @property
    def total_capacity(self) -> float:
        return sum(g.x_max for g in self.generators)

    def generator(self, gid: str) -> GeneratorSpec:
        for g in self.generators:
            if g.id == gid:
                return g
        raise KeyError(gid)


def _require_number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{where}: expected a number")
    return float(value)


def _reject_constant(name):
    raise SchemaError(f"non-finite literal {name} not allowed")


def _curve_from_json(obj, gid: str, x_max: float) -> CostCurve:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise SchemaError(f"{gid}: curve must be exactly one of linear/quadratic/pwl")
    (kind, body), = obj.items()
    if kind == "linear":
        return Linear(_require_number(body, f"{gid}: linear slope"), x_max)
    if kind == "quadratic":
        if not isinstance(body, dict) or set(body) != {"a", "q"}:
            raise SchemaError(f"{gid}: quadratic curve needs keys a and q")
        return Quadratic(
            _require_number(body["a"], f"{gid}: quadratic a"),
            _require_number(body["q"], f"{gid}: quadratic q"),
            x_max,
        )
    if kind == "pwl":
        if not isinstance(body, list) or not body:
            raise SchemaError(f"{gid}: pwl curve needs a nonempty pair list")
        segments = []
        for pair in body:
            if not isinstance(pair, list) or len(pair) != 2:
                raise SchemaError(f"{gid}: pwl entries must be [endpoint, slope] pairs")
            segments.append(
                (
                    _require_number(pair[0], f"{gid}: pwl endpoint"),
                    _require_number(pair[1], f"{gid}: pwl slope"),
                )
            )
        return PiecewiseLinear(tuple(segments))
    raise SchemaError(f"{gid}: unknown curve kind {kind!r}")


def parse_instance(text: str) -> MarketInstance:
    """Parse and validate an instance from JSON text.

    Raises SchemaError for malformed or mistyped input and ValidationError
    (listing every violation) for well-formed input that breaks a model
    invariant.  Every instance this returns passes validate_instance with
    no findings.
    """
    try:
        raw = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise SchemaError("top level must be an object")
    extra = set(raw) - {"demand", "generators"}
    if extra:
        raise SchemaError(f"unknown top-level keys: {sorted(extra)}")
    if "demand" not in raw or "generators" not in raw:
        raise SchemaError("top level needs keys demand and generators")
    demand = _require_number(raw["demand"], "demand")
    if not isinstance(raw["generators"], list):
        raise SchemaError("generators must be a list")

    gens = []
    for k, entry in enumerate(raw["generators"]):
        if not isinstance(entry, dict):
            raise SchemaError(f"generators[{k}]: expected an object")
        extra = set(entry) - {"id", "w", "curve", "x_max"}
        if extra:
            raise SchemaError(f"generators[{k}]: unknown keys {sorted(extra)}")
        missing = {"id", "w", "curve", "x_max"} - set(entry)
        if missing:
            raise SchemaError(f"generators[{k}]: missing keys {sorted(missing)}")
        gid = entry["id"]
        if not isinstance(gid, str) or not gid:
            raise SchemaError(f"generators[{k}]: id must be a nonempty string")
        x_max = _require_number(entry["x_max"], f"{gid}: x_max")
        gens.append(
            GeneratorSpec(
                id=gid,
                startup_cost=_require_number(entry["w"], f"{gid}: w"),
                curve=_curve_from_json(entry["curve"], gid, x_max),
                x_max=x_max,
            )
        )

    instance = MarketInstance(demand=demand, generators=tuple(gens))
    violations = validate_instance(instance)
    if violations:
        raise ValidationError("; ".join(violations), violations)
    return instance


def _curve_violations(g: GeneratorSpec):
    """Yield (rule, message) pairs for one generator's curve."""
    c = g.curve
    if isinstance(c, (Linear, Quadratic)):
        coeffs = (c.a,) if isinstance(c, Linear) else (c.a, c.q)
        if any(not math.isfinite(v) for v in coeffs):
            yield ("coefficients", f"{g.id}: non-finite cost coefficient")
        elif any(v < 0 for v in coeffs):
            yield ("coefficients", f"{g.id}: negative cost coefficient")
        return
    # piecewise linear
    endpoints = [right for right, _ in c.segments]
    slopes = [slope for _, slope in c.segments]
    if any(not math.isfinite(v) for v in endpoints + slopes):
        yield ("coefficients", f"{g.id}: non-finite cost coefficient")
        return
    prev = 0.0
    for right in endpoints:
        if right <= prev:
            yield ("breakpoints", f"{g.id}: non-ascending breakpoints")
            break
        prev = right
    if any(s < 0 for s in slopes):
        yield ("coefficients", f"{g.id}: negative slope")
    if any(b < a for a, b in zip(slopes, slopes[1:])):
        yield ("convexity", f"{g.id}: non-convex curve")


def validate_instance(instance: MarketInstance):
    """Return all invariant violations, deterministically ordered.

    Instance-level findings come first, then per-generator findings sorted
    by (generator id, rule name).  Empty list means the instance is valid.
    """
    tol = boundary_tol()
    found = []

    if not math.isfinite(instance.demand):
        found.append(("", "demand", "demand not finite"))
    elif instance.demand <= 0:
        found.append(("", "demand", "demand not positive"))

    if not instance.generators:
        found.append(("", "generators", "no generators"))

    seen = set()
    for g in instance.generators:
        if g.id in seen:
            found.append(("", f"id {g.id}", f"duplicate id {g.id}"))
        seen.add(g.id)

    if instance.generators and math.isfinite(instance.demand):
        cap = instance.total_capacity
        if cap + FEASIBILITY_TOL < instance.demand:
            found.append(
                ("", "infeasible",
                 f"infeasible: total capacity {cap} below demand {instance.demand}")
            )

    for g in instance.generators:
        if not math.isfinite(g.x_max) or g.x_max <= 0:
            found.append((g.id, "capacity", f"{g.id}: x_max not positive"))
        elif abs(g.curve.domain_max - g.x_max) > tol:
            found.append((g.id, "curve_domain", f"{g.id}: curve domain mismatch"))
        if not math.isfinite(g.startup_cost):
            found.append((g.id, "startup", f"{g.id}: startup_cost not finite"))
        elif g.startup_cost < 0:
            found.append((g.id, "startup", f"{g.id}: startup_cost negative"))
        for rule, msg in _curve_violations(g):
            found.append((g.id, rule, msg))

    found.sort(key=lambda item: (item[0], item[1]))
    return [msg for _, _, msg in found]


def serialize_instance(instance: MarketInstance) -> str:
    """Render an instance back to schema JSON (field-exact round trip)."""
    payload = {
        "demand": instance.demand,
        "generators": [
            {
                "id": g.id,
                "w": g.startup_cost,
                "curve": g.curve.json_form(),
                "x_max": g.x_max,
            }
            for g in instance.generators
        ],
    }
    return json.dumps(payload)
