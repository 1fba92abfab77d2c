"""Hausdorff displacement interpolation on sampled geodesic spaces."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .gh import Ambient, GeodesicSampling, gh_exact
from .spaces import (
    FiniteMetricSpace,
    as_subset,
    circle,
    euclidean_grid,
    hausdorff_distance,
    quotient_pseudometric,
    strip,
    thicken,
)


@dataclass(frozen=True)
class LayeredReachSet:
    times: tuple
    forward: tuple
    backward: tuple
    evaluation: tuple
    rho: float
    step: float  # per-step budget rho / K + slack
    slack: float

    @property
    def K(self) -> int:
        return len(self.times) - 1


def _rho(X, A, B, rho):
    if rho is None:
        rho = float(hausdorff_distance(X, A, B))
    if rho <= 0:
        raise ValueError("rho must be positive; equal endpoints give the constant curve")
    return float(rho)


def lipschitz_reach(X: FiniteMetricSpace, A, B, rho=None, K: int = 8, slack: Optional[float] = None) -> LayeredReachSet:
    """Points visited at time k/K by discrete curves from A to B with steps of at most rho/K + slack."""
    if K < 1:
        raise ValueError("K must be at least 1")
    A, B = as_subset(X, A), as_subset(X, B)
    rho = _rho(X, A, B, rho)
    slack = float(X.mesh if slack is None else slack)
    if slack < 0:
        raise ValueError("slack must be nonnegative")
    step = rho / K + slack
    forward = [A]
    for _ in range(K):
        forward.append(thicken(X, forward[-1], step))
    backward = [B]
    for _ in range(K):
        backward.append(thicken(X, backward[-1], step))
    backward.reverse()
    evaluation = tuple(f & b for f, b in zip(forward, backward))
    times = tuple(k / K for k in range(K + 1))
    return LayeredReachSet(times, tuple(forward), tuple(backward), evaluation, rho, step, slack)


def thickening_geodesic(X: FiniteMetricSpace, A, B, t, rho=None, slack: float = 0.0) -> frozenset:
    """A^(t rho) intersected with B^((1 - t) rho), rho = d_H(A, B)."""
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    A, B = as_subset(X, A), as_subset(X, B)
    rho = _rho(X, A, B, rho)
    out = thicken(X, A, t * rho + slack) & thicken(X, B, (1 - t) * rho + slack)
    if not out:
        raise ValueError("empty slice: the carrier is too far from geodesic at this scale")
    return out


@dataclass(frozen=True)
class LayerComparison:
    t: float
    evaluation_size: int
    thickening_size: int
    hausdorff: float
    unexplained: tuple  # disagreement points farther than the allowance from the other set


@dataclass(frozen=True)
class EqualityReport:
    ok: bool
    allowance: float
    layers: tuple


def interpolation_equals_thickening(X: FiniteMetricSpace, A, B, K: int = 8, slack: Optional[float] = None,
                                    allowance: Optional[float] = None, rho=None) -> EqualityReport:
    """Compare every evaluation layer with the thickening intersection.

    Points in the symmetric difference are tolerated when they lie within
    ``allowance`` (default: the mesh) of the other set.
    """
    reach = lipschitz_reach(X, A, B, rho, K, slack)
    allowance = float(X.mesh if allowance is None else allowance)
    layers = []
    ok = True
    for t, ev in zip(reach.times, reach.evaluation):
        th = thicken(X, A, t * reach.rho) & thicken(X, B, (1 - t) * reach.rho)
        if not ev or not th:
            ok = False
            layers.append(LayerComparison(t, len(ev), len(th), math.inf, ()))
            continue
        dh = float(hausdorff_distance(X, ev, th))
        bad = []
        for x in sorted(ev - th):
            if X.dist[x, sorted(th)].min() > allowance + 1e-12:
                bad.append(x)
        for x in sorted(th - ev):
            if X.dist[x, sorted(ev)].min() > allowance + 1e-12:
                bad.append(x)
        ok = ok and not bad
        layers.append(LayerComparison(t, len(ev), len(th), dh, tuple(bad)))
    return EqualityReport(ok, allowance, tuple(layers))


# ------------------------------------------------------------------ curves

@dataclass(frozen=True)
class DiscreteCurve:
    points: tuple
    times: tuple
    rho: float
    slack: float = 0.0

    def violations(self, X: FiniteMetricSpace, tol: float = 1e-9) -> list:
        """Pairs (i, j) breaking d(x_i, x_j) <= |t_i - t_j| rho + |i - j| slack."""
        P = np.asarray(self.points)
        T = np.asarray(self.times, dtype=float)
        idx = np.arange(len(P))
        bound = np.abs(T[:, None] - T[None, :]) * self.rho + np.abs(idx[:, None] - idx[None, :]) * self.slack
        bad = np.asarray(X.dist, dtype=float)[np.ix_(P, P)] > bound + tol
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(np.triu(bad)))]


def _nearest(X, x, layer, step):
    cand = sorted(layer)
    d = np.asarray(X.dist, dtype=float)[x, cand]
    k = int(np.argmin(d))  # argmin returns the first minimum: lowest index wins ties
    if d[k] > step + 1e-12:
        raise ValueError("curve extraction failed: point is not in the evaluation set")
    return cand[k]


def extract_curve(X: FiniteMetricSpace, reach: LayeredReachSet, k_star: int, x_star: int) -> DiscreteCurve:
    """Greedy curve through x_star at layer k_star: nearest admissible point layer by layer in both directions."""
    if x_star not in reach.evaluation[k_star]:
        raise ValueError("x_star is not in the evaluation layer")
    pts = {k_star: x_star}
    for k in range(k_star + 1, reach.K + 1):
        pts[k] = _nearest(X, pts[k - 1], reach.evaluation[k], reach.step)
    for k in range(k_star - 1, -1, -1):
        pts[k] = _nearest(X, pts[k + 1], reach.evaluation[k], reach.step)
    return DiscreteCurve(tuple(pts[k] for k in range(reach.K + 1)), reach.times, reach.rho, reach.slack)


def geodesic_only_reach(X: FiniteMetricSpace, A, B, rho=None, K: int = 8, slack: Optional[float] = None,
                        chunk: int = 4096) -> LayeredReachSet:
    """Evaluation layers restricted to points on discrete geodesics from A to B.

    x is kept at time t when some a in A, b in B with d(a, b) <= rho + K slack
    satisfy d(a, x) <= t d(a, b) + slack and d(x, b) <= (1 - t) d(a, b) + slack.
    Only points of the Lipschitz layer are tested, since geodesics are Lipschitz.
    """
    lip = lipschitz_reach(X, A, B, rho, K, slack)
    d = np.asarray(X.dist, dtype=float)
    Al, Bl = sorted(lip.evaluation[0] | as_subset(X, A)), sorted(as_subset(X, B))
    dab = d[np.ix_(Al, Bl)]
    ia, ib = np.nonzero(dab <= lip.rho + K * lip.slack + 1e-12)
    pa, pb, L = np.asarray(Al)[ia], np.asarray(Bl)[ib], dab[ia, ib]
    layers = []
    for t, ev in zip(lip.times, lip.evaluation):
        keep = set()
        for x in sorted(ev):
            for lo in range(0, len(L), chunk):
                sl = slice(lo, lo + chunk)
                good = (d[x, pa[sl]] <= t * L[sl] + lip.slack + 1e-12) & (d[x, pb[sl]] <= (1 - t) * L[sl] + lip.slack + 1e-12)
                if good.any():
                    keep.add(x)
                    break
        layers.append(frozenset(keep))
    return LayeredReachSet(lip.times, lip.forward, lip.backward, tuple(layers), lip.rho, lip.step, lip.slack)


# ---------------------------------------------------------- certification

@dataclass(frozen=True)
class HausdorffGeodesicReport:
    ok: bool
    rho: float
    tol: float
    pairs: tuple  # (s, t, d_H, target, ok)
    layers: tuple  # (t, slice inside evaluation layer)

    @property
    def failures(self):
        return [p for p in self.pairs if not p[-1]] + [l for l in self.layers if not l[-1]]


def certify_hausdorff_geodesic(X: FiniteMetricSpace, slices: Sequence, times: Sequence, rho=None,
                               tol: Optional[float] = None) -> HausdorffGeodesicReport:
    """Pairwise d_H(slice_s, slice_t) = |s - t| rho within tol (default twice the mesh),
    plus containment of each slice in the matching layer of the Lipschitz reach set
    built with per-step slack tol (checked when the times form a uniform grid)."""
    slices = [as_subset(X, S) for S in slices]
    times = [float(t) for t in times]
    if len(slices) != len(times) or times[0] != 0 or times[-1] != 1:
        raise ValueError("slices must be sampled on times from 0 to 1")
    tol = float(2 * X.mesh if tol is None else tol)
    if rho is None:
        rho = float(hausdorff_distance(X, slices[0], slices[-1]))
    pairs = []
    for i in range(len(times)):
        for j in range(i + 1, len(times)):
            dh = float(hausdorff_distance(X, slices[i], slices[j]))
            target = (times[j] - times[i]) * rho
            pairs.append((times[i], times[j], dh, target, abs(dh - target) <= tol))
    layers = []
    if rho > 0:
        K = len(times) - 1
        uniform = all(abs(t - k / K) <= 1e-12 for k, t in enumerate(times))
        if uniform:
            reach = lipschitz_reach(X, slices[0], slices[-1], rho, K, slack=tol)  # each step may lose a mesh to rounding
            for t, S, ev in zip(times, slices, reach.evaluation):
                layers.append((t, S <= ev))
    ok = all(p[-1] for p in pairs) and all(l[-1] for l in layers)
    return HausdorffGeodesicReport(ok, float(rho), tol, tuple(pairs), tuple(layers))


# ---------------------------------------------------------- concatenation

@dataclass(frozen=True)
class Concatenation:
    times: tuple
    values: tuple
    rho: float
    breaks: tuple  # global times where the pieces meet


def _pieces(curve):
    if isinstance(curve, DiscreteCurve):
        return tuple(curve.times), tuple(curve.points)
    if isinstance(curve, GeodesicSampling):
        return tuple(curve.times), tuple(curve.spaces)
    times, values = curve
    return tuple(times), tuple(values)


def concatenate(curves: Sequence, lengths: Sequence[float], same: Optional[Callable] = None) -> Concatenation:
    """Join curves parametrized on [0, 1] into one curve on [0, 1].

    Piece i runs on [L_(i-1) / L, L_i / L] with L_i the partial sums of the
    lengths; the result is L-Lipschitz when every piece i is lengths[i]-Lipschitz.
    """
    if len(curves) != len(lengths) or not curves:
        raise ValueError("one length per curve")
    if any(r <= 0 for r in lengths):
        raise ValueError("segment lengths must be positive")
    same = same or (lambda u, v: u == v)
    parts = [_pieces(c) for c in curves]
    for (_, va), (_, vb) in zip(parts, parts[1:]):
        if not same(va[-1], vb[0]):
            raise ValueError("consecutive endpoints do not match")
    total = float(sum(lengths))
    starts = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])
    times, values = [], []
    for k, ((ts, vs), start, r) in enumerate(zip(parts, starts, lengths)):
        for j, (t, v) in enumerate(zip(ts, vs)):
            if k > 0 and j == 0:
                continue
            times.append((start + float(t) * r) / total)
            values.append(v)
    times[-1] = 1.0
    return Concatenation(tuple(times), tuple(values), total, tuple(float(s / total) for s in starts[1:]))


# ----------------------------------------------------------------- examples

@dataclass(frozen=True)
class SquareExample:
    X: FiniteMetricSpace
    A: frozenset
    B: frozenset
    rho: float
    probe: int  # the point (0, 2)


def square_example(h: float = 0.1) -> SquareExample:
    """Two unit squares [-3, -1] x [-1, 1] and [1, 3] x [-1, 1] inside a Euclidean grid on [-3, 3] x [-2, 2]."""
    xs = np.round(np.arange(-3, 3 + h / 2, h), 10)
    ys = np.round(np.arange(-2, 2 + h / 2, h), 10)
    X = euclidean_grid(xs, ys)
    P = np.asarray(X.labels, dtype=float)
    eps = h / 4
    inside = np.abs(P[:, 1]) <= 1 + eps
    A = frozenset(np.flatnonzero(inside & (P[:, 0] <= -1 + eps)).tolist())
    B = frozenset(np.flatnonzero(inside & (P[:, 0] >= 1 - eps)).tolist())
    probe = int(np.argmin(np.abs(P - np.array([0.0, 2.0])).sum(axis=1)))
    return SquareExample(X, A, B, 4.0, probe)


@dataclass(frozen=True)
class SphereExample:
    X: FiniteMetricSpace
    A: frozenset
    B: frozenset
    d_h: float
    d_gh: float


def sphere_example(N: int = 360) -> SphereExample:
    """Two antipodal points inside the N-point circle with arc-length metric."""
    if N % 2:
        raise ValueError("N must be even")
    X = circle(N)
    A = frozenset({0, N // 2})
    B = frozenset(range(N))
    d_gh, _ = gh_exact(X.restrict(sorted(A)), X)
    return SphereExample(X, A, B, float(hausdorff_distance(X, A, B)), float(d_gh))


def sampled_geodesic(X: FiniteMetricSpace, slices: Sequence, times: Sequence, rho) -> GeodesicSampling:
    """Slices as subspaces of a common carrier, which doubles as the ambient space."""
    idx = [np.asarray(sorted(S)) for S in slices]
    spaces = tuple(X.restrict(i) for i in idx)
    return GeodesicSampling(tuple(times), spaces, rho, None, None, Ambient(X, tuple(idx)))


@dataclass(frozen=True)
class StripReport:
    res: float
    endpoint_errors: tuple  # (t, |d([0], g(t)) - 3t|, |d(g(t), [3]) - 3(1 - t)|)
    endpoint_ok: bool
    witness: tuple  # (s, t, distance, 3 |t - s|)
    violation: bool
    flat_is_geodesic: bool


def strip_curve(t, flat: bool = False):
    return (3.0 * t, 0.0 if flat else abs(math.sin(3 * math.pi * t)))


def strip_counterexample(res: float = 0.05, K: int = 60, witness=(1 / 3, 1 / 2)) -> StripReport:
    """The strip with collapsed ends and the sine curve that meets both endpoint conditions but is not a geodesic."""
    if res > 0.1:
        raise ValueError("resolution must be at most 0.1")
    P = strip(res)
    Q, cls = quotient_pseudometric(P)
    pts = np.asarray(P.labels, dtype=float)

    def locate(p):
        return int(cls[int(np.argmin(((pts - np.asarray(p)) ** 2).sum(axis=1)))])

    zero = locate((0.0, 0.0))
    three = locate((3.0, 0.0))
    d = np.asarray(Q.dist, dtype=float)
    errs = []
    for k in range(K + 1):
        t = k / K
        g = locate(strip_curve(t))
        errs.append((t, abs(d[zero, g] - 3 * t), abs(d[g, three] - 3 * (1 - t))))
    endpoint_ok = all(e1 <= res + 1e-9 and e2 <= res + 1e-9 for _, e1, e2 in errs)
    s, t = witness
    dw = float(d[locate(strip_curve(s)), locate(strip_curve(t))])
    flat = [locate(strip_curve(k / K, flat=True)) for k in range(K + 1)]
    flat_ok = all(abs(d[flat[i], flat[j]] - 3 * (j - i) / K) <= res + 1e-9
                  for i in range(K + 1) for j in range(i, K + 1))
    return StripReport(res, tuple(errs), endpoint_ok, (s, t, dw, 3 * abs(t - s)), dw > 3 * abs(t - s) + res, flat_ok)

