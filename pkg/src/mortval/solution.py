"""Piecewise-closed-form value functions produced by the solvers.

A solved contract is an ordered list of regions partitioning (0, inf).
On each region the value function has the form

    V(h) = c_p1 * h^{p1} + c_p2 * h^{-p2} + k0 + k1 * h,

which covers continuation regions (power terms plus the particular
solution of the coupon) as well as stopping regions (pure affine pieces:
V = h on a default region, V = B0 + alpha (h-1) on a prepayment band).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

import numpy as np

from .errors import UnsupportedRegime
from .model import Exponents


class Action(str, Enum):
    DEFAULT = "default"
    CONTINUE = "continue"
    PREPAY = "prepay"


def _power_term(coeff: float, h: np.ndarray, exponent: float) -> np.ndarray:
    """coeff * h**exponent evaluated in log space.

    Large characteristic exponents can push h**p past float range while
    the product with a correspondingly tiny coefficient stays ordinary;
    combining the factors in the exponent keeps the term finite whenever
    the term itself is.
    """
    with np.errstate(divide="ignore"):
        magnitude = np.exp(math.log(abs(coeff)) + exponent * np.log(h))
    return math.copysign(1.0, coeff) * magnitude


@dataclass(frozen=True)
class Region:
    """One piece of a solved value function on the interval (lo, hi)."""

    lo: float
    hi: float
    action: Action
    c_p1: float = 0.0
    c_p2: float = 0.0
    k0: float = 0.0
    k1: float = 0.0

    def value(self, h, exponents: Exponents):
        h = np.asarray(h, dtype=float)
        v = self.k0 + self.k1 * h
        # Power terms are skipped when their coefficient is zero so that
        # affine stopping regions evaluate safely for arbitrarily large h.
        if self.c_p1 != 0.0:
            v = v + _power_term(self.c_p1, h, exponents.p1)
        if self.c_p2 != 0.0:
            v = v + _power_term(self.c_p2, h, -exponents.p2)
        return v

    def derivative(self, h, exponents: Exponents):
        h = np.asarray(h, dtype=float)
        d = np.full_like(h, self.k1)
        if self.c_p1 != 0.0:
            d = d + _power_term(self.c_p1 * exponents.p1, h, exponents.p1 - 1.0)
        if self.c_p2 != 0.0:
            d = d - _power_term(self.c_p2 * exponents.p2, h, -exponents.p2 - 1.0)
        return d

    def second_derivative(self, h, exponents: Exponents):
        h = np.asarray(h, dtype=float)
        p1, p2 = exponents.p1, exponents.p2
        s = np.zeros_like(h)
        if self.c_p1 != 0.0:
            s = s + _power_term(self.c_p1 * p1 * (p1 - 1.0), h, p1 - 2.0)
        if self.c_p2 != 0.0:
            s = s + _power_term(self.c_p2 * p2 * (p2 + 1.0), h, -p2 - 2.0)
        return s


@dataclass(frozen=True)
class SolvedContract:
    """Ordered regions, named boundaries, and the exponents that built them.

    Regions are contiguous and cover (0, inf).  A price sitting exactly on
    a boundary belongs to the stopping side, matching the stopping rule
    "terminate on first entry into the stopping set"; by value matching the
    evaluated number is the same either way up to rounding.
    """

    regions: tuple[Region, ...]
    boundaries: Mapping[str, float]
    exponents: Exponents

    def __post_init__(self) -> None:
        regs = self.regions
        assert regs[0].lo == 0.0 and regs[-1].hi == np.inf
        for left, right in zip(regs, regs[1:]):
            assert left.hi == right.lo and left.lo < left.hi
        for reg in regs:
            if not all(map(math.isfinite, (reg.c_p1, reg.c_p2, reg.k0, reg.k1))):
                # Boundary exponent products past float range (p ln h beyond
                # ~700) have no representable coefficients; such regimes sit
                # far outside economically meaningful parameters.
                raise UnsupportedRegime(
                    f"value-function coefficients exceed floating-point range on "
                    f"({reg.lo}, {reg.hi})"
                )

    def _edges(self) -> tuple[np.ndarray, np.ndarray]:
        edges = np.array([reg.hi for reg in self.regions[:-1]])
        owner_left = np.array(
            [
                self.regions[i].action is not Action.CONTINUE
                or self.regions[i + 1].action is Action.CONTINUE
                for i in range(len(edges))
            ]
        )
        return edges, owner_left

    def region_index(self, h):
        """Index of the region owning each price in ``h``."""
        h_arr = np.asarray(h, dtype=float)
        edges, owner_left = self._edges()
        idx = np.searchsorted(edges, h_arr, side="right")
        for j, edge in enumerate(edges):
            if owner_left[j]:
                idx = np.where(h_arr == edge, j, idx)
        return int(idx) if np.isscalar(h) or h_arr.ndim == 0 else idx

    def region_at(self, h: float) -> Region:
        return self.regions[self.region_index(float(h))]

    def _apply(self, h, fn: str):
        h_arr = np.atleast_1d(np.asarray(h, dtype=float))
        idx = np.asarray(self.region_index(h_arr))
        out = np.empty_like(h_arr)
        for i, reg in enumerate(self.regions):
            mask = idx == i
            if mask.any():
                out[mask] = getattr(reg, fn)(h_arr[mask], self.exponents)
        if np.isscalar(h) or np.asarray(h).ndim == 0:
            return float(out[0])
        return out

    def value(self, h):
        """Contract value at ``h`` (scalar or array)."""
        return self._apply(h, "value")

    def derivative(self, h):
        return self._apply(h, "derivative")

    def to_dict(self) -> dict:
        """JSON-friendly representation (infinite upper ends become None)."""
        return {
            "regions": [
                {
                    "lo": reg.lo,
                    "hi": None if np.isinf(reg.hi) else reg.hi,
                    "action": reg.action.value,
                    "coeffs": {"c_p1": reg.c_p1, "c_p2": reg.c_p2, "k0": reg.k0, "k1": reg.k1},
                }
                for reg in self.regions
            ],
            "boundaries": dict(self.boundaries),
            "exponents": {"p1": self.exponents.p1, "p2": self.exponents.p2},
        }
