"""Exception hierarchy shared across the toolkit."""


class WclError(Exception):
    """Base class for all toolkit errors (maps to CLI exit code 1)."""


class NetworkFormatError(WclError):
    """Malformed or inconsistent network input file."""


class RouteError(WclError):
    """Route violates adjacency or references unknown segments."""


class SamplingError(WclError):
    """Not enough candidate routes to draw the requested sample."""


class EnumerationCapError(WclError):
    """Graph too large for all-pairs route enumeration."""


class InsufficientChargingPowerError(WclError):
    """Even installing a WCL on every segment cannot make the route feasible.

    Maps to CLI exit code 2 (model infeasibility).
    """


class NoPathError(WclError):
    """The SOC-state graph has no s-t path."""


class CandidateLimitError(WclError):
    """Too many candidate segments for exhaustive enumeration."""


class NonconvergenceError(WclError):
    """Power iteration failed to converge."""

    def __init__(self, iterations: int):
        super().__init__(f"eigenvector power iteration did not converge "
                         f"after {iterations} iterations")
        self.iterations = iterations
