"""Exception types and shared configuration knobs."""

import os


class CrossthetaError(Exception):
    """Base class for all library errors."""


class InvalidLattice(CrossthetaError):
    """Basis is singular or otherwise not a lattice generator matrix."""


class NotIntegral(CrossthetaError):
    """An exact integer basis was required but not supplied."""


class NotSublattice(CrossthetaError):
    """Claimed sublattice relation does not hold."""


class CapExceeded(CrossthetaError):
    """An enumeration grew past its configured cap."""


class NonIntegralResult(CrossthetaError):
    """A computation that must produce integers did not round cleanly.

    Signals either invalid input or loss of precision in the
    floating-point cosine path.
    """


class IdentityMismatch(CrossthetaError):
    """The two independent evaluation routes of a bound disagree."""


class NoSignChange(CrossthetaError):
    """Bisection bracket does not bracket a root."""


class InsufficientConstellation(CrossthetaError):
    """PAM constellation too small to cover all cosets."""


class Infeasible(CrossthetaError):
    """Constraint set of a configuration solve is numerically inconsistent."""


class NoConvergence(CrossthetaError):
    """Iterative solve exhausted its round budget."""


#: Default cap on enumerated codewords / lattice points.  The environment
#: variable CROSSTHETA_CAP overrides it process-wide.
DEFAULT_CAP = 2**24


def enumeration_cap(override: int | None = None) -> int:
    if override is not None:
        return int(override)
    env = os.environ.get("CROSSTHETA_CAP")
    if env:
        return int(env)
    return DEFAULT_CAP
