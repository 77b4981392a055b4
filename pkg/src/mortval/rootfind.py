"""Deterministic scalar root finding on a bracketing interval.

All free-boundary equations in this package reduce to scalar roots of
monotone functions on known brackets, so a single bracketed solver serves
every caller.  The method is Brent-style: inverse quadratic / secant steps
guarded by bisection, which keeps guaranteed convergence even where the
boundary equations have steep power-law behaviour near a bracket endpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .errors import InvalidParams, MaxIterExceeded, NoBracket

_EPS = 2.220446049250313e-16  # float64 machine epsilon


@dataclass(frozen=True)
class RootConfig:
    """Tolerance policy for bracketed root finding.

    ``rel_tol`` is applied to the residual relative to the bracket's value
    span |f(lo) - f(hi)|; ``abs_tol`` is an absolute residual floor.
    """

    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_iter: int = 200

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0 and self.max_iter >= 1):
            raise InvalidParams(
                f"RootConfig requires rel_tol > 0, abs_tol > 0, max_iter >= 1; "
                f"got rel_tol={self.rel_tol}, abs_tol={self.abs_tol}, max_iter={self.max_iter}"
            )


def find_root_bracketed(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    cfg: RootConfig | None = None,
) -> float:
    """Return a root of ``f`` inside [lo, hi].

    Requires f(lo) * f(hi) <= 0.  The iteration stops once the residual
    satisfies |f(x)| <= max(abs_tol, rel_tol * |f(lo) - f(hi)|) *and* the
    bracket is within rel_tol of the iterate, or the bracket has collapsed
    to floating-point resolution.  Demanding both guards against functions
    that span many orders of magnitude across the bracket, where the
    residual criterion alone is met far from the root.  The sequence of
    iterates is fully determined by the inputs, so identical calls return
    bit-identical results.
    """
    if cfg is None:
        cfg = RootConfig()
    if not lo < hi:
        raise NoBracket(f"need lo < hi, got [{lo}, {hi}]")

    a, b = lo, hi
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise NoBracket(f"f has the same sign at both ends: f({lo})={fa}, f({hi})={fb}")

    f_tol = max(cfg.abs_tol, cfg.rel_tol * abs(fa - fb))

    # Classic Brent bookkeeping: b is the current best iterate, c the
    # previous one with f(b) * f(c) <= 0, and [b, c] brackets the root.
    c, fc = a, fa
    d = e = b - a

    for _ in range(cfg.max_iter):
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb

        tol = 2.0 * _EPS * abs(b) + 0.5 * _EPS
        m = 0.5 * (c - b)
        x_converged = abs(m) <= cfg.rel_tol * max(abs(b), 1.0)
        if (abs(fb) <= f_tol and x_converged) or fb == 0.0 or abs(m) <= tol:
            return b

        if abs(e) < tol or abs(fa) <= abs(fb):
            d = e = m  # fall back to bisection
        else:
            s = fb / fa
            if a == c:
                p = 2.0 * m * s  # secant
                q = 1.0 - s
            else:
                q = fa / fc  # inverse quadratic interpolation
                t = fb / fc
                p = s * (2.0 * m * q * (q - t) - (b - a) * (t - 1.0))
                q = (q - 1.0) * (t - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            else:
                p = -p
            s, e = e, d
            if 2.0 * p < 3.0 * m * q - abs(tol * q) and p < abs(0.5 * s * q):
                d = p / q
            else:
                d = e = m

        a, fa = b, fb
        b += d if abs(d) > tol else (tol if m > 0.0 else -tol)
        fb = f(b)
        if (fb > 0.0) == (fc > 0.0):
            c, fc = a, fa
            d = e = b - a

    raise MaxIterExceeded(f"no convergence within {cfg.max_iter} iterations")


def grow_bracket(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    factor: float = 2.0,
    cap: float = float("inf"),
) -> tuple[float, float]:
    """Expand ``hi`` geometrically until [lo, hi] brackets a sign change.

    The lower end stays fixed.  Raises ``NoBracket`` once ``hi`` would
    exceed ``cap`` without the sign of f flipping.
    """
    f_lo = f(lo)
    while True:
        f_hi = f(hi)
        if f_lo * f_hi <= 0.0:
            return lo, hi
        if hi >= cap:
            raise NoBracket(f"no sign change of f on [{lo}, {cap}]")
        hi = min(hi * factor, cap)
