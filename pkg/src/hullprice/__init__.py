"""Pricing engine for one-period single-node power markets with start-up costs.

Exact commitment and dispatch, convex-hull (uplift-minimizing) prices, and
capped-dual prices that shrink uplift further when oversized units distort
the hull.
"""

from .cost_analysis import (
    HulledCurve,
    Interval,
    ProfitResult,
    average_total_cost,
    cost_eval,
    ec_min,
    hull_cost,
    marginal_subdiff,
    profit,
    supply_correspondence,
)
from .dual_pricing import (
    PriceSet,
    UpliftReport,
    aggregate_supply,
    dual_value,
    price_set,
    uplifts,
)
from .errors import (
    DomainError,
    InfeasibleError,
    NoCrossingError,
    PricingError,
    SchemaError,
    SizeError,
    StalePriceError,
    UnknownFormatError,
    ValidationError,
)
from .market_model import (
    CostCurve,
    GeneratorSpec,
    Linear,
    MarketInstance,
    PiecewiseLinear,
    Quadratic,
    parse_instance,
    serialize_instance,
    validate_instance,
)
from .mchp import (
    ContractBounds,
    DiagnosticsReport,
    LnmguPartition,
    MchpResult,
    classify_lnmgu,
    contract_bounds,
    default_epsilon,
    diagnostics,
    eps_dual_system,
    mchp_price_set_eps,
    mchp_price_set_limit,
    mchp_uplifts,
)
from .primal_solver import (
    DispatchSolution,
    ScheduleEntry,
    economic_dispatch,
    solve_primal,
)
from .report import (
    PricingReport,
    SweepRow,
    load_sweep,
    render_report,
    render_sweep,
    report_dict,
    run_pipeline,
)

__version__ = "0.1.0"

__all__ = [
    "CostCurve",
    "ContractBounds",
    "DiagnosticsReport",
    "DispatchSolution",
    "DomainError",
    "GeneratorSpec",
    "HulledCurve",
    "InfeasibleError",
    "Interval",
    "Linear",
    "LnmguPartition",
    "MarketInstance",
    "MchpResult",
    "NoCrossingError",
    "PiecewiseLinear",
    "PriceSet",
    "PricingError",
    "PricingReport",
    "ProfitResult",
    "Quadratic",
    "ScheduleEntry",
    "SchemaError",
    "SizeError",
    "StalePriceError",
    "SweepRow",
    "UnknownFormatError",
    "UpliftReport",
    "ValidationError",
    "aggregate_supply",
    "average_total_cost",
    "classify_lnmgu",
    "contract_bounds",
    "cost_eval",
    "default_epsilon",
    "diagnostics",
    "dual_value",
    "ec_min",
    "economic_dispatch",
    "eps_dual_system",
    "hull_cost",
    "load_sweep",
    "marginal_subdiff",
    "mchp_price_set_eps",
    "mchp_price_set_limit",
    "mchp_uplifts",
    "parse_instance",
    "price_set",
    "profit",
    "render_report",
    "render_sweep",
    "report_dict",
    "run_pipeline",
    "serialize_instance",
    "solve_primal",
    "supply_correspondence",
    "uplifts",
    "validate_instance",
]
