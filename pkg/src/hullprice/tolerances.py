"""Numeric tolerances used across the package."""

import os

# Half-width of the band in which a price counts as exactly at a supply
# threshold.  Two orders of magnitude below the 1e-9 price reporting
# tolerance (but still well above the 5e-13 bisection bracket width), so
# bisected price-set endpoints stay far inside that tolerance.
PRICE_EQ_TOL = 1e-11

# Slack for demand-vs-capacity feasibility comparisons (MW).
FEASIBILITY_TOL = 1e-9

# How far a settlement price may drift outside the computed price set
# before it is rejected as stale ($/MWh).
STALE_PRICE_TOL = 1e-6


def boundary_tol() -> float:
    """Comparison tolerance for arguments at API boundaries.

    The PRICER_TOL environment variable overrides the default 1e-7.
    """
    return float(os.environ.get("PRICER_TOL", "1e-7"))
