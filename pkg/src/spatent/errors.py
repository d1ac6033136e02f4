"""Exception and warning types shared across the package."""


class InvalidDistributionError(ValueError):
    """A probability vector failed validation (negative entry, or mass not 1)."""


class AbsoluteContinuityError(ValueError):
    """KL divergence requested for p not absolutely continuous w.r.t. q."""


class CoverageError(ValueError):
    """A distance classification leaves some inter-pixel distance without a band."""


class ConsistencyError(RuntimeError):
    """Two mathematically equivalent computation routes disagreed.

    Raised instead of silently returning either value; indicates a numerical
    or logic fault that must not be papered over.
    """


class DegenerateDistributionWarning(UserWarning):
    """A degenerate input forced a documented fallback value (usually 0)."""
