"""Adaptive Simpson quadrature for smooth integrands on finite intervals."""

from .errors import DomainError, NumericalError

DEFAULT_QUAD_TOL = 1e-10
_MAX_DEPTH = 60


def adaptive_simpson(f, a: float, b: float, tol: float = DEFAULT_QUAD_TOL) -> float:
    """Integrate f over [a, b] to a combined absolute + relative tolerance.

    Classic bisection scheme: a subinterval is accepted when the two-panel
    refinement changes its Simpson value by at most 15x the local tolerance,
    and the Richardson-extrapolated value is kept.  The local tolerance halves
    with each split; the global target is ``tol * max(1, |I|)`` with |I|
    estimated from the first whole-interval pass.  Raises after 60 levels.
    """
    if not (0.0 < tol < 1.0):
        raise DomainError(f"quadrature tolerance must lie in (0, 1), got {tol}")
    if a == b:
        return 0.0
    if a > b:
        raise DomainError(f"integration bounds must satisfy a <= b, got [{a}, {b}]")

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    eps = tol * max(1.0, abs(whole))

    def rec(x0, x2, f0, f1, f2, s, budget, depth):
        x1 = 0.5 * (x0 + x2)
        lm = 0.5 * (x0 + x1)
        rm = 0.5 * (x1 + x2)
        flm = f(lm)
        frm = f(rm)
        left = (x1 - x0) / 6.0 * (f0 + 4.0 * flm + f1)
        right = (x2 - x1) / 6.0 * (f1 + 4.0 * frm + f2)
        delta = left + right - s
        if abs(delta) <= 15.0 * budget:
            return left + right + delta / 15.0
        if depth >= _MAX_DEPTH:
            raise NumericalError(
                f"adaptive Simpson did not converge on [{x0}, {x2}] after {_MAX_DEPTH} levels"
            )
        half = 0.5 * budget
        return rec(x0, x1, f0, flm, f1, left, half, depth + 1) + rec(
            x1, x2, f1, frm, f2, right, half, depth + 1
        )

    return rec(a, b, fa, fm, fb, whole, eps, 0)
