"""Modified Bessel function I0 and small combinatorial helpers.

Every closed-form covariance of the mean-field limit reduces to

    I0(z) = sum_{l >= 0} (z/2)^(2l) / (l!)^2

or to its shifted variant I0(z) - 1.  Both are evaluated by direct summation
in increasing l with the term recurrence

    term_{l+1} = term_l * (z/2)^2 / (l+1)^2,

stopping only once a geometric bound certifies that the omitted tail is below
``rel_tol`` times the partial sum.  The shifted variant starts the series at
l = 1 instead of subtracting 1, so it is free of cancellation at small z.

Arguments in this package stay below z ~ 40, where the series is stable in
double precision; no asymptotic-expansion branch is provided.
"""

import math
from dataclasses import dataclass

from .errors import DomainError, NumericalError

DEFAULT_REL_TOL = 1e-12

_MAX_TERMS = 10_000


@dataclass(frozen=True)
class SeriesTolerance:
    """Relative truncation tolerance for the I0 power series."""

    rel_tol: float = DEFAULT_REL_TOL

    def __post_init__(self):
        if not (0.0 < self.rel_tol < 1.0):
            raise DomainError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")


def _check_argument(z) -> float:
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"argument must be finite, got {z}")
    if z < 0.0:
        raise DomainError(f"argument must be nonnegative, got {z}")
    return z


def _series_sum(z: float, rel_tol: float, start: int) -> tuple[float, int]:
    """Sum sum_{l >= start} (z/2)^(2l)/(l!)^2 with a certified relative error.

    Returns ``(value, l_star)`` where ``l_star`` is the index of the last term
    included.  On return the omitted tail is bounded by
    ``term_{l_star+1} / (1 - q)`` with ``q = (z/2)^2 / (l_star+2)^2 < 1``, and
    that bound is at most ``rel_tol`` times the returned partial sum.
    """
    h = (0.5 * z) ** 2
    if start == 0:
        term = 1.0
    elif start == 1:
        term = h
    else:  # pragma: no cover - only starts 0 and 1 are used
        term = h**start / math.factorial(start) ** 2
    total = term
    l = start
    while l < _MAX_TERMS:
        nxt = term * h / (l + 1) ** 2
        q = h / (l + 2) ** 2
        if q < 1.0 and nxt <= rel_tol * total * (1.0 - q):
            return total, l
        total += nxt
        term = nxt
        l += 1
    raise NumericalError(
        f"I0 series did not certify rel_tol={rel_tol} within {_MAX_TERMS} terms at z={z}"
    )


def i0(z, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """Modified Bessel function of the first kind, order zero, for z >= 0."""
    value, _ = _series_sum(_check_argument(z), SeriesTolerance(rel_tol).rel_tol, 0)
    return value


def i0m1(z, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """I0(z) - 1, summed directly from the l = 1 term to avoid cancellation.

    Nonnegative and nondecreasing in z.
    """
    value, _ = _series_sum(_check_argument(z), SeriesTolerance(rel_tol).rel_tol, 1)
    return value


def double_factorial(n: int) -> int:
    """Product 1 * 3 * ... * n for odd positive n.

    Counts the perfect pairings of n + 1 items, which is what turns the
    surviving pair sentences into Gaussian even moments in the large-N limit.
    """
    if not isinstance(n, int) or isinstance(n, bool):
        raise DomainError(f"n must be an integer, got {n!r}")
    if n < 1 or n % 2 == 0:
        raise DomainError(f"n must be an odd positive integer, got {n}")
    return math.prod(range(1, n + 1, 2))
