"""Exception types raised by the solvers and analysis routines."""


class BundleQEDError(Exception):
    """Base class for all package-specific failures."""


class NonUniqueSteadyStateError(BundleQEDError):
    """The Liouvillian null space is degenerate; no unique stationary state."""


class NoConvergenceError(BundleQEDError):
    """A solve finished but violated its residual or sanity tolerances."""


class TruncationFailureError(BundleQEDError):
    """Fock-space truncation could not be converged below the ceiling."""


class StiffnessError(BundleQEDError):
    """The time integrator underflowed its step size."""


class InsufficientOscillationError(BundleQEDError):
    """A time series has too few local maxima to define an envelope."""


class TruncationUnreliableError(BundleQEDError):
    """Requested quantity needs more Fock states than the space provides."""


class MeanTooLargeError(BundleQEDError):
    """Ideal bundle distribution would need a negative vacuum weight."""


class DegenerateConfigurationError(BundleQEDError):
    """Parameter combination for which a closed form is singular."""


class IntegratorFailureError(BundleQEDError):
    """Stochastic propagation lost the norm bracket for a jump."""
