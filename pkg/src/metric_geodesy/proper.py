"""Piecewise-linear increasing functions with a linear tail and their inverses."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

REFINE_TOL = 1e-6


@dataclass(frozen=True)
class ProperFunction:
    """Monotone piecewise-linear f with f(0) = 0.

    ``breakpoints`` are ``(x, y)`` pairs with strictly increasing x starting at
    ``(0, 0)``; beyond the last breakpoint f continues with ``tail_slope``.
    A zero tail slope models a bounded function.
    """

    breakpoints: tuple
    tail_slope: float = 1.0

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.breakpoints)
        if not pts or pts[0] != (0.0, 0.0):
            raise ValueError("a proper function passes through (0, 0)")
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoint x values must be strictly increasing")
        if any(b < a for a, b in zip(ys, ys[1:])):
            raise ValueError("breakpoint y values must be nondecreasing")
        if self.tail_slope < 0:
            raise ValueError("tail slope must be nonnegative")
        object.__setattr__(self, "breakpoints", pts)
        object.__setattr__(self, "tail_slope", float(self.tail_slope))

    @property
    def xs(self) -> np.ndarray:
        return np.array([p[0] for p in self.breakpoints])

    @property
    def ys(self) -> np.ndarray:
        return np.array([p[1] for p in self.breakpoints])

    @property
    def strict(self) -> bool:
        """Strictly increasing wherever it has not reached its supremum."""
        ys = self.ys
        return bool(np.all(np.diff(ys) > 0)) and (self.tail_slope > 0 or len(ys) > 1)

    @property
    def supremum(self) -> float:
        return math.inf if self.tail_slope > 0 else float(self.ys[-1])

    def __call__(self, x: float) -> float:
        if x < 0:
            raise ValueError("proper functions live on [0, inf)")
        xs, ys = self.xs, self.ys
        if x >= xs[-1]:
            return float(ys[-1] + self.tail_slope * (x - xs[-1]))
        return float(np.interp(x, xs, ys))

    @classmethod
    def identity(cls, cap: float | None = None) -> "ProperFunction":
        if cap is None:
            return cls(((0.0, 0.0), (1.0, 1.0)), 1.0)
        return cls(((0.0, 0.0), (cap, cap)), 0.0)

    @classmethod
    def from_callable(
        cls,
        f: Callable[[float], float],
        knots: Sequence[float],
        tail_slope: float,
        tol: float = REFINE_TOL,
        max_depth: int = 40,
    ) -> "ProperFunction":
        """Piecewise-linear model of f, refining each knot interval until the
        chord deviates from f by less than ``tol`` at interior probe points."""
        knots = sorted(set(float(k) for k in knots) | {0.0})
        pts = [(0.0, 0.0)]

        def refine(a, fa, b, fb, depth):
            probes = [a + (b - a) * q for q in (0.25, 0.5, 0.75)]
            err = max(abs(f(p) - (fa + (fb - fa) * (p - a) / (b - a))) for p in probes)
            if err < tol or depth >= max_depth:
                pts.append((b, fb))
                return
            m = 0.5 * (a + b)
            fm = f(m)
            refine(a, fa, m, fm, depth + 1)
            refine(m, fm, b, fb, depth + 1)

        for a, b in zip(knots, knots[1:]):
            refine(a, f(a) if a > 0 else 0.0, b, f(b), 0)
        return cls(tuple(pts), tail_slope)

    def inverse(self) -> "ProperFunction":
        """Piecewise-linear inverse of a strictly increasing f with positive tail."""
        if not self.strict or self.tail_slope <= 0:
            raise ValueError("inverse as a proper function needs strict f with an unbounded tail")
        return ProperFunction(tuple((y, x) for x, y in self.breakpoints), 1.0 / self.tail_slope)


def generalized_inverse(f: ProperFunction, y: float) -> float:
    """``inf {x >= 0 : f(x) >= y}`` with ``inf of the empty set = inf``."""
    if y < 0:
        raise ValueError("generalized inverse is defined for y >= 0")
    xs, ys = f.xs, f.ys
    if y <= 0:
        return 0.0
    if y > ys[-1]:
        if f.tail_slope <= 0:
            return math.inf
        return float(xs[-1] + (y - ys[-1]) / f.tail_slope)
    k = int(np.searchsorted(ys, y, side="left"))  # first breakpoint with ys[k] >= y
    if ys[k] == y:
        # f may be flat just before: step back to the first x where the level is reached
        while k > 0 and ys[k - 1] == y:
            k -= 1
        return float(xs[k])
    x0, x1, y0, y1 = xs[k - 1], xs[k], ys[k - 1], ys[k]
    return float(x0 + (y - y0) * (x1 - x0) / (y1 - y0))
