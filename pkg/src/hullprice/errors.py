"""Exception types shared across the package."""


class PricingError(Exception):
    """Base class for every error this package raises deliberately."""


class SchemaError(PricingError):
    """Input JSON is malformed or does not match the instance schema."""


class ValidationError(PricingError):
    """An instance violates a model invariant.

    ``violations`` keeps the individual findings so callers can tell an
    infeasible-but-well-formed instance from a malformed one.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = tuple(violations)


class DomainError(PricingError):
    """A numeric argument lies outside the operation's domain."""


class InfeasibleError(PricingError):
    """Total capacity cannot cover demand."""


class SizeError(PricingError):
    """Too many generators for exhaustive commitment search."""


class NoCrossingError(PricingError):
    """Aggregate supply never reaches demand.

    Defensive: unreachable for instances that pass feasibility checks.
    """


class StalePriceError(PricingError):
    """A settlement price lies outside the current price set."""


class UnknownFormatError(PricingError):
    """Requested report format is not supported."""
