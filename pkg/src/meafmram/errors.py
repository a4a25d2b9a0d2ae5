"""Exception types shared across the simulator."""


class RegimeError(ValueError):
    """Operating point lies outside the regime a formula is valid for."""


class ResolutionError(ValueError):
    """Time step too coarse for the dynamics being integrated."""


class WriteBlocked(RuntimeError):
    """Gate voltage does not exceed the critical voltage; the cell stays in hold."""


class CounterOverflow(RuntimeError):
    """A line counter reached its maximum; the key must be rotated."""


class AnalysisError(ValueError):
    """Trace set carries no usable information (e.g. all traces identical)."""


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""
