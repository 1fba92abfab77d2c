"""Discrete optimal transport on a finite carrier."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .spaces import MASS_TOL, FiniteMetricSpace, as_subset, directed_hausdorff, hausdorff_distance


class MassMismatch(ValueError):
    pass


def _weights(w) -> np.ndarray:
    w = np.asarray(w)
    if w.dtype != object:
        w = w.astype(float)
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    return w


def transport_lp(cost: np.ndarray, a, b):
    """Minimum-cost coupling of weight vectors a, b under a cost matrix.

    Solved with the HiGHS dual simplex on the support of a and b, so the plan
    is a vertex of the transportation polytope.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if abs(a.sum() - b.sum()) > MASS_TOL:
        raise MassMismatch(f"marginal masses differ: {a.sum()} vs {b.sum()}")
    ia = np.flatnonzero(a > 0)
    ib = np.flatnonzero(b > 0)
    C = np.asarray(cost, dtype=float)[np.ix_(ia, ib)]
    n, m = C.shape
    A_eq = np.zeros((n + m, n * m))
    for i in range(n):
        A_eq[i, i * m:(i + 1) * m] = 1.0
    for j in range(m):
        A_eq[n + j, j::m] = 1.0
    rhs = np.concatenate([a[ia], b[ib]])
    rhs[n:] *= a[ia].sum() / b[ib].sum()  # absorb round-off so the system is consistent
    res = linprog(C.ravel(), A_eq=A_eq[:-1], b_eq=rhs[:-1], bounds=(0, None), method="highs-ds")
    if res.status != 0:
        raise RuntimeError(f"transport LP failed: {res.message}")
    plan = np.zeros((len(a), len(b)))
    plan[np.ix_(ia, ib)] = np.clip(res.x.reshape(n, m), 0.0, None)
    return float((plan * np.asarray(cost, dtype=float)).sum()), plan


def wasserstein_p(Z: FiniteMetricSpace, a, b, p: float = 1.0):
    """(min_mu sum d^p mu)^(1/p) and an optimal coupling."""
    if not p >= 1 or not np.isfinite(p):
        raise ValueError("p must be finite and at least 1")
    d = np.asarray(Z.dist, dtype=float)
    cost, plan = transport_lp(d ** p, _weights(a), _weights(b))
    return max(cost, 0.0) ** (1.0 / p), plan


def bottleneck_feasible(allowed: np.ndarray, a, b) -> bool:
    """Can a be moved onto b using only the allowed (True) entries?"""
    cost = np.where(allowed, 0.0, 1.0)
    value, _ = transport_lp(cost, a, b)
    return value <= MASS_TOL


def wasserstein_inf(Z: FiniteMetricSpace, a, b) -> float:
    """min over couplings of the largest distance in the support, by bisection
    over the sorted distinct distances."""
    a = _weights(a).astype(float)
    b = _weights(b).astype(float)
    d = np.asarray(Z.dist, dtype=float)
    ia, ib = np.flatnonzero(a > 0), np.flatnonzero(b > 0)
    sub = d[np.ix_(ia, ib)]
    levels = np.unique(sub)
    lo, hi = 0, len(levels) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if bottleneck_feasible(sub <= levels[mid], a[ia], b[ib]):
            hi = mid
        else:
            lo = mid + 1
    return float(levels[lo])


def linear_interpolation(a, b, t):
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    return (1 - t) * _weights(a) + t * _weights(b)


def interpolation_coupling(a, b, mu, s, t):
    """(1 - t) diag(a) + s diag(b) + (t - s) mu: a coupling of the interpolants at s and t."""
    if not 0 <= s <= t <= 1:
        raise ValueError("need 0 <= s <= t <= 1")
    a = _weights(a)
    b = _weights(b)
    mu = np.asarray(mu)
    return (1 - t) * np.diag(a) + s * np.diag(b) + (t - s) * mu


def coupling_cost(cost, plan):
    """sum cost * plan, exact when either argument holds Fractions."""
    cost = np.asarray(cost)
    plan = np.asarray(plan)
    if cost.dtype == object or plan.dtype == object:
        return sum((Fraction(c) if not isinstance(c, Fraction) else c) * q
                   for c, q in zip(cost.ravel().tolist(), plan.ravel().tolist()))
    return float((cost * plan).sum())


# ------------------------------------------------------ hyperspace bounds

def epsilon_net(Z: FiniteMetricSpace, X, eps) -> list:
    """Greedy net: every point of X is within eps of a net point."""
    X = sorted(as_subset(Z, X))
    net = []
    uncovered = list(X)
    while uncovered:
        c = uncovered[0]
        net.append(c)
        uncovered = [x for x in uncovered if Z.dist[x, c] > eps]
    return net


@dataclass(frozen=True)
class TransportMap:
    domain: tuple
    image: dict  # domain index -> codomain index
    eta: float
    eps: float
    max_displacement: float

    @property
    def bound(self) -> float:
        return self.eta + self.eps

    @property
    def ok(self) -> bool:
        return self.max_displacement <= self.bound + 1e-12

    def pushforward(self, n: int, alpha) -> np.ndarray:
        """Push a weight vector on the domain (indexed like ``domain``) to a vector on the carrier."""
        beta = np.zeros(n)
        for x, w in zip(self.domain, alpha):
            beta[self.image[x]] += w
        return beta


def voronoi_transport_map(Z: FiniteMetricSpace, X, Y, eps) -> TransportMap:
    """Net of X, Voronoi cells (ties to the earliest net point), each cell sent to a
    point of Y within d_H(X, Y) of its center."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    Xs = sorted(as_subset(Z, X))
    Ys = sorted(as_subset(Z, Y))
    eta = float(hausdorff_distance(Z, Xs, Ys))
    net = epsilon_net(Z, Xs, eps)
    target = {c: Ys[int(np.argmin(Z.dist[c, Ys]))] for c in net}
    image = {}
    for x in Xs:
        c = net[int(np.argmin(Z.dist[x, net]))]
        image[x] = target[c]
    disp = max(float(Z.dist[x, y]) for x, y in image.items())
    return TransportMap(tuple(Xs), image, eta, float(eps), disp)


def random_measure(k: int, rng: np.random.Generator, alpha: float = 1.0) -> np.ndarray:
    return rng.dirichlet(np.full(k, alpha))


@dataclass(frozen=True)
class HyperspaceReport:
    eta: float
    eps: float
    lower: float  # distance of the Dirac at the Hausdorff maximizer to the other hyperspace
    estimate: float
    samples: tuple  # (sample_id, side, distance to other hyperspace, pushforward cost, within)

    @property
    def sandwich(self):
        return (self.eta, self.eta + self.eps)

    @property
    def ok(self) -> bool:
        lo, hi = self.sandwich
        return lo - 1e-9 <= self.estimate <= hi and all(s[-1] for s in self.samples)


def distance_to_hyperspace(Z: FiniteMetricSpace, support, alpha, Y, p) -> float:
    """min over measures beta on Y of W_p(alpha, beta): every atom moves to its nearest point of Y."""
    Ys = sorted(Y)
    gaps = np.asarray(Z.dist, dtype=float)[np.ix_(list(support), Ys)].min(axis=1)
    if np.isinf(p):
        return float(gaps[np.asarray(alpha) > 0].max())
    return float((np.asarray(alpha) * gaps ** p).sum() ** (1.0 / p))


def hyperspace_hausdorff_check(Z: FiniteMetricSpace, X, Y, p=1.0, eps=0.1, n_samples=50, seed=0) -> HyperspaceReport:
    """Sampled check that the Hausdorff distance between the measure hyperspaces
    of X and Y sits in [d_H(X, Y), d_H(X, Y) + eps]."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    rng = np.random.default_rng(seed)
    Xs = sorted(as_subset(Z, X))
    Ys = sorted(as_subset(Z, Y))
    eta = float(hausdorff_distance(Z, Xs, Ys))
    maps = {"X": voronoi_transport_map(Z, Xs, Ys, eps), "Y": voronoi_transport_map(Z, Ys, Xs, eps)}
    other = {"X": Ys, "Y": Xs}
    n = len(Z)
    samples = []
    estimate = 0.0
    for k in range(n_samples):
        side = "X" if k % 2 == 0 else "Y"
        xi = maps[side]
        dom = list(xi.domain)
        alpha = random_measure(len(dom), rng)
        full = np.zeros(n)
        full[dom] = alpha
        beta = xi.pushforward(n, alpha)
        if np.isinf(p):
            cost = wasserstein_inf(Z, full, beta)
        else:
            cost = wasserstein_p(Z, full, beta, p)[0]
        dist = distance_to_hyperspace(Z, dom, alpha, other[side], p)
        estimate = max(estimate, dist)
        samples.append((k, side, dist, cost, bool(dist <= cost + 1e-12 and cost <= eta + eps + 1e-12)))
    gx, _ = directed_hausdorff(Z, Xs, Ys)
    gy, _ = directed_hausdorff(Z, Ys, Xs)
    side, source = ("X", Xs) if gx >= gy else ("Y", Ys)
    _, peak = directed_hausdorff(Z, source, other[side])
    lower = distance_to_hyperspace(Z, [peak], [1.0], other[side], p)
    estimate = max(estimate, lower)
    return HyperspaceReport(eta, float(eps), lower, estimate, tuple(samples))
