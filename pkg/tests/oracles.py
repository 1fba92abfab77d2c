"""Independent brute-force references and random instance generators for the tests."""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
from scipy.sparse.csgraph import shortest_path

from metric_geodesy.spaces import FiniteMetricSpace, MetricMeasureSpace


# ------------------------------------------------------------- generators

def euclidean_space(rng, n, dim=2, scale=1.0):
    P = rng.random((n, dim)) * scale
    d = np.linalg.norm(P[:, None] - P[None], axis=2)
    return FiniteMetricSpace(tuple(range(n)), d)


def integer_space(rng, n, high=9):
    """Shortest-path metric of a complete graph with integer weights: exact in floats."""
    W = rng.integers(1, high + 1, size=(n, n)).astype(float)
    W = np.minimum(W, W.T)
    np.fill_diagonal(W, 0.0)
    d = shortest_path(W, method="FW", directed=False)
    return FiniteMetricSpace(tuple(range(n)), d)


def rational_space(rng, n, high=9):
    X = integer_space(rng, n, high)
    return X.to_exact()


def uniform_mm(X, exact=False):
    n = len(X)
    mass = [Fraction(1, n)] * n if exact else np.full(n, 1.0 / n)
    return MetricMeasureSpace(X, mass)


def dirichlet_mm(rng, X):
    return MetricMeasureSpace(X, rng.dirichlet(np.ones(len(X))))


# ---------------------------------------------------------------- oracles

def gh_bruteforce(X, Y):
    """Half the minimum distortion over every relation in X x Y that is surjective on both sides."""
    n, m = len(X), len(Y)
    pairs = list(itertools.product(range(n), range(m)))
    k = len(pairs)
    I = np.array([p[0] for p in pairs])
    J = np.array([p[1] for p in pairs])
    gap = np.abs(np.asarray(X.dist, float)[np.ix_(I, I)] - np.asarray(Y.dist, float)[np.ix_(J, J)])
    masks = np.arange(1, 2 ** k)
    sel = ((masks[:, None] >> np.arange(k)[None, :]) & 1).astype(bool)
    onto_x = np.stack([sel[:, I == i].any(axis=1) for i in range(n)], axis=1).all(axis=1)
    onto_y = np.stack([sel[:, J == j].any(axis=1) for j in range(m)], axis=1).all(axis=1)
    sel = sel[onto_x & onto_y]
    best = np.inf
    for lo in range(0, len(sel), 4096):
        s = sel[lo:lo + 4096]
        both = s[:, :, None] & s[:, None, :]
        dis = np.where(both, gap[None], 0.0).max(axis=(1, 2))
        best = min(best, float(dis.min()))
    return best / 2


def transport_vertices(C, a, b):
    """Minimum of the transportation LP over all basic feasible solutions."""
    n, m = C.shape
    A = np.zeros((n + m, n * m))
    for i in range(n):
        A[i, i * m:(i + 1) * m] = 1
    for j in range(m):
        A[n + j, j::m] = 1
    A = A[:-1]
    rhs = np.concatenate([a, b])[:-1]
    r = n + m - 1
    best = np.inf
    combos = np.array(list(itertools.combinations(range(n * m), r)))
    for lo in range(0, len(combos), 20000):
        cb = combos[lo:lo + 20000]
        M = A[:, cb].transpose(1, 0, 2)
        ok = np.abs(np.linalg.det(M)) > 1e-9
        if not ok.any():
            continue
        x = np.linalg.solve(M[ok], np.broadcast_to(rhs, (ok.sum(), r))[..., None])[..., 0]
        feas = (x >= -1e-12).all(axis=1)
        if feas.any():
            cost = (C.ravel()[cb[ok][feas]] * x[feas]).sum(axis=1)
            best = min(best, float(cost.min()))
    return best


def ball_profile(d, mass, eps):
    """min over x of the mass of the closed eps-ball, by direct counting."""
    n = len(mass)
    return min(sum((Fraction(mass[j]) for j in range(n) if d[x][j] <= eps), Fraction(0)) for x in range(n))


def hausdorff_direct(d, A, B):
    return max(max(min(d[a][b] for b in B) for a in A), max(min(d[a][b] for a in A) for b in B))
