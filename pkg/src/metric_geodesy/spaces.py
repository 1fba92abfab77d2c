"""Finite metric spaces, subset calculus and standard test spaces.

Distances live in dense matrices. A matrix of ``dtype=object`` holding
``fractions.Fraction`` entries marks an exact space: every comparison on it
is done with zero tolerance.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

import numpy as np

TOL = 1e-9  # metric and set-membership tolerance for float spaces
MASS_TOL = 1e-9
EXACT_GUARD = 20  # largest space accepted by exact set cover


def is_exact(matrix: np.ndarray) -> bool:
    return np.asarray(matrix).dtype == object


def tolerance_for(matrix: np.ndarray, tol: float = TOL):
    return 0 if is_exact(matrix) else tol


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    return Fraction(float(value))


def exact_array(values) -> np.ndarray:
    """Object array of Fractions; floats convert with their exact binary value."""
    arr = np.asarray(values, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = to_fraction(arr[idx])
    return out


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=arr.dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: list = field(default_factory=list)  # triples (i, k, j): d[i,k] > d[i,j] + d[j,k]
    issues: list = field(default_factory=list)

    def first(self):
        return self.violations[0] if self.violations else None


def validate_metric(matrix, tolerance: float = TOL, pseudo: bool = False) -> ValidationReport:
    """Check zero diagonal, symmetry, positivity and every triangle inequality.

    Violated triangles are reported as ``(i, k, j)`` with ``i < k`` meaning
    ``d[i, k] > d[i, j] + d[j, k] + tolerance``.
    """
    d = np.asarray(matrix)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {d.shape}")
    tol = tolerance_for(d, tolerance)
    n = d.shape[0]
    issues = []
    diag = [i for i in range(n) if abs(d[i, i]) > tol]
    if diag:
        issues.append(("diagonal", diag))
    asym = np.argwhere(np.triu(np.abs(d - d.T) > tol, 1))
    if len(asym):
        issues.append(("symmetry", [tuple(map(int, p)) for p in asym]))
    neg = np.argwhere(d < -tol)
    if len(neg):
        issues.append(("negative", [tuple(map(int, p)) for p in neg]))
    if not pseudo:
        zero = np.argwhere(np.triu(np.abs(d) <= (tol if tol else 0), 1))
        if len(zero):
            issues.append(("positivity", [tuple(map(int, p)) for p in zero]))
    violations = []
    upper = np.triu(np.ones((n, n), dtype=bool), 1)
    for j in range(n):
        bad = (d > d[:, j][:, None] + d[j, :][None, :] + tol) & upper
        for i, k in np.argwhere(bad):
            violations.append((int(i), int(k), j))
    violations.sort()
    return ValidationReport(ok=not violations and not issues, violations=violations, issues=issues)


@dataclass(frozen=True)
class FiniteMetricSpace:
    labels: tuple
    dist: np.ndarray
    mesh: float = 0.0

    allow_zero = False

    def __post_init__(self):
        d = np.asarray(self.dist)
        if d.dtype != object:
            d = d.astype(float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError(f"distance matrix must be square, got shape {d.shape}")
        if len(self.labels) != d.shape[0]:
            raise ValueError("one label per point required")
        if d.shape[0] == 0:
            raise ValueError("empty space")
        if self.mesh < 0:
            raise ValueError("mesh must be nonnegative")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "dist", _readonly(d))

    def __len__(self) -> int:
        return self.dist.shape[0]

    @property
    def exact(self) -> bool:
        return is_exact(self.dist)

    @property
    def tol(self):
        return tolerance_for(self.dist)

    def diameter(self):
        return self.dist.max()

    def index(self, label: Hashable) -> int:
        return self.labels.index(label)

    def validate(self, tolerance: float = TOL) -> ValidationReport:
        return validate_metric(self.dist, tolerance, pseudo=self.allow_zero)

    def restrict(self, indices: Iterable[int]) -> "FiniteMetricSpace":
        idx = sorted(indices)
        return type(self)(tuple(self.labels[i] for i in idx), self.dist[np.ix_(idx, idx)], self.mesh)

    def to_exact(self) -> "FiniteMetricSpace":
        return type(self)(self.labels, exact_array(self.dist), self.mesh)

    def to_float(self) -> "FiniteMetricSpace":
        return type(self)(self.labels, np.asarray(self.dist, dtype=float), self.mesh)

    def __eq__(self, other):
        return (
            type(self) is type(other)
            and self.labels == other.labels
            and self.mesh == other.mesh
            and self.dist.dtype == other.dist.dtype
            and np.array_equal(self.dist, other.dist)
        )

    __hash__ = None


class PseudoMetricSpace(FiniteMetricSpace):
    """Same data as a metric space, zero distances between distinct points allowed."""

    allow_zero = True


@dataclass(frozen=True)
class MetricMeasureSpace:
    space: FiniteMetricSpace
    mass: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mass)
        if m.dtype != object:
            m = m.astype(float)
        if m.shape != (len(self.space),):
            raise ValueError("mass vector length must match the space")
        object.__setattr__(self, "mass", _readonly(m))

    def __len__(self) -> int:
        return len(self.space)

    @property
    def dist(self):
        return self.space.dist

    @property
    def exact(self) -> bool:
        return self.space.exact

    def check_mass(self, tolerance: float = MASS_TOL) -> list:
        """Return a list of ``(code, index)`` problems; empty when the mass is valid."""
        tol = tolerance_for(self.mass, tolerance)
        problems = [("FULL_SUPPORT", int(i)) for i in range(len(self.mass)) if not self.mass[i] > 0]
        if abs(sum(self.mass) - 1) > tol:
            problems.append(("MASS_SUM", None))
        return problems

    def validate(self, tolerance: float = TOL) -> ValidationReport:
        rep = self.space.validate(tolerance)
        problems = self.check_mass(tolerance)
        if not problems:
            return rep
        return ValidationReport(False, rep.violations, rep.issues + [("mass", problems)])

    def __eq__(self, other):
        return (
            isinstance(other, MetricMeasureSpace)
            and self.space == other.space
            and self.mass.dtype == other.mass.dtype
            and np.array_equal(self.mass, other.mass)
        )

    __hash__ = None


# ---------------------------------------------------------------- quotients

def quotient_pseudometric(P: FiniteMetricSpace, tolerance: float = TOL):
    """Collapse points at zero distance.

    Returns the metric quotient and ``class_map`` sending each input index to
    its class index. Classes are numbered by their smallest member and labelled
    by the tuple of member labels (or the single label for singletons).
    """
    d = P.dist
    tol = tolerance_for(d, tolerance)
    n = len(P)
    class_map = [-1] * n
    reps = []
    for i in range(n):
        if class_map[i] >= 0:
            continue
        c = len(reps)
        reps.append(i)
        for j in range(i, n):
            if class_map[j] < 0 and abs(d[i, j]) <= tol:
                class_map[j] = c
    members = [[] for _ in reps]
    for i, c in enumerate(class_map):
        members[c].append(P.labels[i])
    labels = tuple(m[0] if len(m) == 1 else tuple(m) for m in members)
    Q = FiniteMetricSpace(labels, d[np.ix_(reps, reps)], P.mesh)
    return Q, np.asarray(class_map, dtype=int)


# ----------------------------------------------------------- subset calculus

def as_subset(X: FiniteMetricSpace, A: Iterable[int]) -> frozenset:
    A = frozenset(int(a) for a in A)
    if not A:
        raise ValueError("subsets must be nonempty")
    if min(A) < 0 or max(A) >= len(X):
        raise IndexError("subset index out of range")
    return A


def distance_to_set(X: FiniteMetricSpace, A: Iterable[int]) -> np.ndarray:
    idx = sorted(as_subset(X, A))
    return X.dist[:, idx].min(axis=1)


def thicken(X: FiniteMetricSpace, A: Iterable[int], r, tolerance: float = TOL) -> frozenset:
    """Closed r-thickening ``{x : d(x, A) <= r + tol}``."""
    if r < 0:
        raise ValueError("thickening radius must be nonnegative")
    dA = distance_to_set(X, A)
    tol = tolerance_for(X.dist, tolerance)
    return frozenset(np.flatnonzero(dA <= r + tol).tolist()) | frozenset(A)


def directed_hausdorff(X: FiniteMetricSpace, A, B):
    """``max_{a in A} d(a, B)`` together with a maximizing ``a``."""
    a_idx = sorted(as_subset(X, A))
    b_idx = sorted(as_subset(X, B))
    gaps = X.dist[np.ix_(a_idx, b_idx)].min(axis=1)
    k = int(np.argmax(gaps))
    return gaps[k], a_idx[k]


def hausdorff_distance(X: FiniteMetricSpace, A, B):
    return max(directed_hausdorff(X, A, B)[0], directed_hausdorff(X, B, A)[0])


def covering_number(X: FiniteMetricSpace, eps, mode: str = "greedy", guard: int = EXACT_GUARD) -> int:
    """Number of closed eps-balls needed to cover X (exact or greedy upper bound)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    n = len(X)
    balls = np.asarray(X.dist <= eps + X.tol, dtype=bool)
    if mode == "greedy":
        uncovered = np.ones(n, dtype=bool)
        count = 0
        while uncovered.any():
            gain = (balls & uncovered).sum(axis=1)
            c = int(np.argmax(gain))
            uncovered &= ~balls[c]
            count += 1
        return count
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    if n > guard:
        raise ValueError(f"exact covering number refused above {guard} points")
    masks = [sum(1 << j for j in np.flatnonzero(balls[i])) for i in range(n)]
    full = (1 << n) - 1
    for k in range(1, n + 1):
        for combo in itertools.combinations(masks, k):
            acc = 0
            for m in combo:
                acc |= m
            if acc == full:
                return k
    return n


def midpoint_defect(X: FiniteMetricSpace):
    """Worst approximate-midpoint error over all pairs of points."""
    d = X.dist
    n = len(X)
    worst = 0 * d[0, 0]
    for x in range(n):
        half = d[x] / 2  # d(x, y)/2 for every y
        err = np.maximum(np.abs(d[x][None, :] - half[:, None]), np.abs(d - half[:, None]))
        worst = max(worst, err.min(axis=1).max())
    return worst


# ------------------------------------------------------- standard spaces

def simplex(n: int, measure: bool = False, exact: bool = False):
    """Delta_n: n points at mutual distance 1, optionally with uniform mass."""
    if n < 1:
        raise ValueError("simplex needs n >= 1")
    d = 1 - np.eye(n)
    if exact:
        d = exact_array(d.astype(int))
    X = FiniteMetricSpace(tuple(f"x{i}" for i in range(n)), d)
    if not measure:
        return X
    mass = exact_array([Fraction(1, n)] * n) if exact else np.full(n, 1.0 / n)
    return MetricMeasureSpace(X, mass)


def cycle(n: int, edge: float = 1.0) -> FiniteMetricSpace:
    if n < 1:
        raise ValueError("cycle needs n >= 1")
    k = np.arange(n)
    steps = np.abs(k[:, None] - k[None, :])
    d = np.minimum(steps, n - steps) * edge
    return FiniteMetricSpace(tuple(f"v{i}" for i in range(n)), d, mesh=edge)


def segment(points: int, length: float = 1.0) -> FiniteMetricSpace:
    """Equispaced samples of [0, length] with the path metric."""
    if points < 2:
        raise ValueError("segment needs at least two points")
    xs = np.linspace(0.0, length, points)
    return FiniteMetricSpace(tuple(float(x) for x in xs), np.abs(xs[:, None] - xs[None, :]), mesh=xs[1] - xs[0])


def grid(width: int, length: int, h: float = 1.0) -> FiniteMetricSpace:
    """width x length lattice graph with edge length h (L1 path metric)."""
    if width < 1 or length < 1 or h <= 0:
        raise ValueError("grid needs positive sizes")
    pts = [(i, j) for j in range(length) for i in range(width)]
    P = np.asarray(pts, dtype=float)
    d = np.abs(P[:, None, :] - P[None, :, :]).sum(axis=2) * h
    return FiniteMetricSpace(tuple(pts), d, mesh=h)


def euclidean_grid(xs: Sequence[float], ys: Sequence[float]) -> FiniteMetricSpace:
    """Product grid in the plane with the Euclidean metric; labels are (x, y)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    P = np.array([(x, y) for y in ys for x in xs])
    diff = P[:, None, :] - P[None, :, :]
    d = np.sqrt((diff ** 2).sum(axis=2))
    h = float(max(np.diff(xs).max(initial=0), np.diff(ys).max(initial=0)))
    labels = tuple((round(float(x), 10), round(float(y), 10)) for x, y in P)
    return FiniteMetricSpace(labels, d, mesh=h)


def circle(N: int) -> FiniteMetricSpace:
    """N equispaced points on the unit circle with arc-length distance."""
    if N < 1:
        raise ValueError("circle needs N >= 1")
    space = cycle(N, edge=2 * math.pi / N)
    return FiniteMetricSpace(tuple(f"theta{i}" for i in range(N)), space.dist, mesh=2 * math.pi / N)


def strip_metric(p, q) -> float:
    """min(x + x', |p - q|, 6 - (x + x')) on [0, 3] x [0, 1]."""
    s = p[0] + q[0]
    return min(s, math.hypot(p[0] - q[0], p[1] - q[1]), 6 - s)


def strip(res: float) -> PseudoMetricSpace:
    """The collapsed-ends strip sampled on a res-spaced grid, before quotienting."""
    if res <= 0:
        raise ValueError("resolution must be positive")
    nx = int(round(3 / res))
    ny = int(round(1 / res))
    xs = np.linspace(0.0, 3.0, nx + 1)
    ys = np.linspace(0.0, 1.0, ny + 1)
    P = np.array([(x, y) for x in xs for y in ys])
    s = P[:, 0][:, None] + P[:, 0][None, :]
    diff = P[:, None, :] - P[None, :, :]
    d = np.minimum(np.minimum(s, np.sqrt((diff ** 2).sum(axis=2))), 6 - s)
    np.fill_diagonal(d, 0.0)
    labels = tuple((round(float(x), 10), round(float(y), 10)) for x, y in P)
    return PseudoMetricSpace(labels, d, mesh=res)


def standard_space(kind: str, *args, **kwargs):
    builders = {
        "simplex": simplex,
        "cycle": cycle,
        "segment": segment,
        "grid": grid,
        "circle": circle,
        "strip": strip,
    }
    if kind not in builders:
        raise ValueError(f"unknown space kind {kind!r}")
    return builders[kind](*args, **kwargs)
