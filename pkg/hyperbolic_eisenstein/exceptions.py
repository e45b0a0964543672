"""
Exceptions for the hyperbolic Eisenstein series library.
"""


class HyperbolicEisensteinError(Exception):
    """
    Base exception for every error raised by this package.

    Catch this to handle any failure of a geometric, special-function,
    summation or configuration step in one place.
    """
    pass


class DomainError(HyperbolicEisensteinError):
    """
    Raised when a point or parameter lies outside an operation's domain.

    Examples are points on or below the real axis, ℜs outside a series'
    half-plane of convergence, or a kernel evaluated on its diagonal.
    """
    pass


class PoleError(HyperbolicEisensteinError):
    """Raised near a pole of Gamma or a singularity of the b_q recurrence."""
    pass


class ConvergenceError(HyperbolicEisensteinError):
    """
    Raised when a summation stops at its cap without meeting its tolerance.

    Series evaluations only raise this under a strict truncation policy;
    otherwise they return a result flagged as not converged.
    """
    pass


class DiscretenessError(HyperbolicEisensteinError):
    """Raised when a group fails ping-pong validation or contains an elliptic."""
    pass


class ConfigError(HyperbolicEisensteinError):
    """Raised when a CLI job configuration cannot be loaded or validated."""
    pass
