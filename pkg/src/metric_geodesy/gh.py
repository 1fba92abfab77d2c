"""Correspondences, exact Gromov-Hausdorff distance and GH geodesics.

The exact distance is found by searching the sorted list of candidate
distortion values. For a threshold ``delta`` a correspondence with distortion
at most ``delta`` is a set of pairs that are pairwise compatible (distance gap
at most ``delta``) and cover both spaces; the covering search branches on the
uncovered point with the fewest compatible candidates, which prunes every
partial assignment whose distortion already exceeds the threshold.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .spaces import (
    TOL,
    FiniteMetricSpace,
    PseudoMetricSpace,
    hausdorff_distance,
    quotient_pseudometric,
    tolerance_for,
)

SEARCH_GUARD = 7


class SizeGuardExceeded(ValueError):
    pass


def worker_count() -> int:
    """Thread cap taken from METRIC_GEODESY_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("METRIC_GEODESY_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Correspondence:
    pairs: tuple
    n: int
    m: int

    def __post_init__(self):
        pairs = tuple(sorted({(int(i), int(j)) for i, j in self.pairs}))
        object.__setattr__(self, "pairs", pairs)
        left = {i for i, _ in pairs}
        right = {j for _, j in pairs}
        if left != set(range(self.n)) or right != set(range(self.m)):
            raise ValueError("a correspondence must cover both spaces")

    @classmethod
    def full(cls, n: int, m: int) -> "Correspondence":
        return cls(tuple(itertools.product(range(n), range(m))), n, m)

    @classmethod
    def diagonal(cls, n: int) -> "Correspondence":
        return cls(tuple((i, i) for i in range(n)), n, n)

    def arrays(self):
        P = np.asarray(self.pairs, dtype=int)
        return P[:, 0], P[:, 1]

    def transpose(self) -> "Correspondence":
        return Correspondence(tuple((j, i) for i, j in self.pairs), self.m, self.n)

    def __len__(self) -> int:
        return len(self.pairs)


def _gap_matrix(dX, dY, I, J):
    return np.abs(dX[np.ix_(I, I)] - dY[np.ix_(J, J)])


def distortion(X: FiniteMetricSpace, Y: FiniteMetricSpace, R: Correspondence):
    if (R.n, R.m) != (len(X), len(Y)):
        raise ValueError("correspondence does not match the spaces")
    I, J = R.arrays()
    return _gap_matrix(X.dist, Y.dist, I, J).max()


# ------------------------------------------------------------ exact search

def covering_clique(compat: np.ndarray, covers: Sequence[Sequence[int]], n_elements: int):
    """Smallest-branching search for pairwise compatible nodes covering all elements.

    Returns the chosen node indices in ascending order, or None.
    """
    compat = np.asarray(compat, dtype=bool)
    N = compat.shape[0]
    element_nodes = np.zeros((n_elements, N), dtype=bool)
    for node, elems in enumerate(covers):
        for e in elems:
            element_nodes[e, node] = True
    failed = set()

    def search(chosen, allowed, covered):
        if covered.all():
            return chosen
        key = (allowed.tobytes(), covered.tobytes())
        if key in failed:
            return None
        counts = (element_nodes & allowed).sum(axis=1)
        counts[covered] = N + 1
        e = int(np.argmin(counts))
        if counts[e] == 0:
            failed.add(key)
            return None
        for node in np.flatnonzero(element_nodes[e] & allowed):
            cov = covered.copy()
            cov[list(covers[node])] = True
            found = search(chosen + [int(node)], allowed & compat[node], cov)
            if found is not None:
                return found
        failed.add(key)
        return None

    found = search([], np.ones(N, dtype=bool), np.zeros(n_elements, dtype=bool))
    return None if found is None else sorted(found)


def _candidates(values) -> list:
    return sorted(set(np.asarray(values).ravel().tolist()))


def _bisect(cands, feasible):
    """Smallest candidate whose feasibility witness is not None."""
    lo, hi = 0, len(cands) - 1
    best = feasible(cands[hi])
    while lo < hi:
        mid = (lo + hi) // 2
        w = feasible(cands[mid])
        if w is None:
            lo = mid + 1
        else:
            hi, best = mid, w
    return cands[hi], best


def _two_point_coloring(dY, D, delta):
    """Surjective map Y -> {0, 1} of distortion <= delta against a 2-point space."""
    m = dY.shape[0]
    iu, ju = np.triu_indices(m, 1)
    dv = dY[iu, ju]
    diff = np.asarray(dv > delta, dtype=bool)
    same = np.asarray(np.abs(D - dv) > delta, dtype=bool)
    if np.any(diff & same):
        return None
    si, sj = iu[same], ju[same]
    di, dj = iu[diff], ju[diff]
    rows = np.concatenate([si, si + m, di, di + m])
    cols = np.concatenate([sj, sj + m, dj + m, dj])
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(2 * m, 2 * m))
    ncomp, labels = connected_components(graph, directed=False)
    pos, neg = labels[:m], labels[m:]
    if np.any(pos == neg):
        return None
    color = (pos > neg).astype(int)
    if color.min() == color.max():
        if ncomp == 2:
            return None  # one rigid block, every point forced to the same side
        block = {pos[0], neg[0]}
        flip = np.array([p in block for p in pos])
        color = np.where(flip, 1 - color, color)
    return color


def _gh_small(X: FiniteMetricSpace, Y: FiniteMetricSpace):
    """Exact GH distance when X has one or two points."""
    n, m = len(X), len(Y)
    if n == 1:
        return Y.diameter() / 2, Correspondence.full(1, m)
    if m == 1:
        return X.diameter() / 2, Correspondence.full(n, 1)
    D = X.dist[0, 1]
    iu, ju = np.triu_indices(m, 1)
    dv = Y.dist[iu, ju]
    cands = _candidates(np.concatenate([dv, np.abs(D - dv)]))
    value, color = _bisect(cands, lambda delta: _two_point_coloring(Y.dist, D, delta))
    R = Correspondence(tuple((int(c), j) for j, c in enumerate(color)), 2, m)
    return distortion(X, Y, R) / 2, R


def _decide(X, Y, G, delta):
    n, m = len(X), len(Y)
    compat = np.asarray(G <= delta, dtype=bool)
    covers = [(i, n + j) for i in range(n) for j in range(m)]
    nodes = covering_clique(compat, covers, n + m)
    if nodes is None:
        return None
    return Correspondence(tuple(divmod(k, m) for k in nodes), n, m)


def gh_exact(X: FiniteMetricSpace, Y: FiniteMetricSpace, guard: int = SEARCH_GUARD):
    """Exact d_GH and a minimizing correspondence.

    Spaces with one or two points on either side are solved directly at any
    size; otherwise both sides must be within ``guard`` points.
    """
    if len(X) <= 2:
        return _gh_small(X, Y)
    if len(Y) <= 2:
        value, R = _gh_small(Y, X)
        return value, R.transpose()
    n, m = len(X), len(Y)
    if max(n, m) > guard:
        raise SizeGuardExceeded(f"exact GH search limited to {guard} points, got {n} and {m}")
    G = np.abs(X.dist[:, None, :, None] - Y.dist[None, :, None, :]).reshape(n * m, n * m)
    lower = abs(X.diameter() - Y.diameter())
    cands = [c for c in _candidates(G) if c >= lower]
    value, R = _bisect(cands, lambda delta: _decide(X, Y, G, delta))
    return value / 2, R


def gh_lower_bound(X: FiniteMetricSpace, Y: FiniteMetricSpace):
    return abs(X.diameter() - Y.diameter()) / 2


# -------------------------------------------------------------- geodesics

@dataclass(frozen=True)
class Ambient:
    """A common space with one index array per sampled time (slice point -> ambient point)."""

    space: FiniteMetricSpace
    embeddings: tuple


@dataclass(frozen=True)
class DynamicCorrespondence:
    tuples: tuple

    def project(self, i: int, j: int) -> set:
        return {(tup[i], tup[j]) for tup in self.tuples}


@dataclass(frozen=True)
class GeodesicSampling:
    times: tuple
    spaces: tuple
    endpoint_value: Optional[object] = None
    certified: Optional[bool] = None
    dynamic: Optional[DynamicCorrespondence] = None
    ambient: Optional[Ambient] = None

    def __post_init__(self):
        if len(self.times) != len(self.spaces) or not self.times:
            raise ValueError("one space per sampled time")
        if self.times[0] != 0 or self.times[-1] != 1:
            raise ValueError("sampled times must start at 0 and end at 1")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("sampled times must increase")
        if self.endpoint_value is not None and self.endpoint_value < 0:
            raise ValueError("endpoint value must be nonnegative")


def dyadic_times(K: int = 8, exact: bool = False) -> tuple:
    from fractions import Fraction

    if K < 1:
        raise ValueError("grid needs K >= 1")
    if exact:
        return tuple(Fraction(k, K) for k in range(K + 1))
    return tuple(k / K for k in range(K + 1))


def straight_slice(X: FiniteMetricSpace, Y: FiniteMetricSpace, R: Correspondence, t) -> FiniteMetricSpace:
    I, J = R.arrays()
    d = (1 - t) * X.dist[np.ix_(I, I)] + t * Y.dist[np.ix_(J, J)]
    labels = tuple((X.labels[i], Y.labels[j]) for i, j in R.pairs)
    return FiniteMetricSpace(labels, d)


def dynamic_correspondence_from_straight_line(X, Y, R: Correspondence, times) -> DynamicCorrespondence:
    """One tuple per pair (x, y): x at time 0, the pair itself inside, y at time 1."""
    tuples = []
    for r, (i, j) in enumerate(R.pairs):
        tuples.append(tuple(i if t == 0 else j if t == 1 else r for t in times))
    return DynamicCorrespondence(tuple(tuples))


def straight_line_gh_geodesic(X, Y, R: Correspondence, times, verify: bool = True, guard: int = SEARCH_GUARD):
    """Sample t -> (R, (1 - t) d_X + t d_Y) with X and Y at the endpoints.

    With ``verify`` the optimality of R is checked by exact search when the
    sizes allow it; ``certified`` is None when that check was not possible.
    """
    times = tuple(times)
    rho = distortion(X, Y, R) / 2
    certified = None
    if verify:
        try:
            value, _ = gh_exact(X, Y, guard)
            certified = bool(abs(value - rho) <= tolerance_for(X.dist))
        except SizeGuardExceeded:
            certified = None
    spaces = tuple(X if t == 0 else Y if t == 1 else straight_slice(X, Y, R, t) for t in times)
    return GeodesicSampling(
        times, spaces, rho, certified, dynamic_correspondence_from_straight_line(X, Y, R, times)
    )


# ----------------------------------------------------------------- gluing

@dataclass(frozen=True)
class GluedSpace:
    space: FiniteMetricSpace
    embeddings: tuple


def _block(dA, cross, dB):
    top = np.concatenate([dA, cross], axis=1)
    bottom = np.concatenate([cross.T, dB], axis=1)
    return np.concatenate([top, bottom], axis=0)


def _glue_block(labels, block, mesh=0.0):
    P = PseudoMetricSpace(tuple(labels), block, mesh)
    return quotient_pseudometric(P)


def glue_via_correspondence(X: FiniteMetricSpace, Y: FiniteMetricSpace, R: Correspondence) -> GluedSpace:
    """Disjoint union with d(x, y) = min over R of d_X(x, x') + d_Y(y', y) + dis(R)/2."""
    I, J = R.arrays()
    half = distortion(X, Y, R) / 2
    cross = (X.dist[:, I][:, :, None] + Y.dist[J, :][None, :, :]).min(axis=1) + half
    labels = [("X", l) for l in X.labels] + [("Y", l) for l in Y.labels]
    Z, cmap = _glue_block(labels, _block(X.dist, cross, Y.dist))
    n = len(X)
    return GluedSpace(Z, (cmap[:n], cmap[n:]))


def glue_cylinder(X: FiniteMetricSpace, Y: FiniteMetricSpace, R: Correspondence, times) -> GluedSpace:
    """Sampled cylinder R x times glued along the straight-line slices.

    ``embeddings[k][r]`` is the ambient index of pair r at time ``times[k]``.
    """
    times = tuple(times)
    I, J = R.arrays()
    rho = distortion(X, Y, R) / 2
    slices = [(1 - t) * X.dist[np.ix_(I, I)] + t * Y.dist[np.ix_(J, J)] for t in times]
    k = len(R)
    T = len(times)
    block = np.empty((T * k, T * k), dtype=slices[0].dtype)
    for a, b in itertools.product(range(T), repeat=2):
        via = (slices[a][:, None, :] + slices[b][None, :, :]).min(axis=2)
        block[a * k:(a + 1) * k, b * k:(b + 1) * k] = via + rho * abs(times[a] - times[b])
    labels = [(R.pairs[r], t) for t in times for r in range(k)]
    Z, cmap = _glue_block(labels, block)
    return GluedSpace(Z, tuple(cmap[a * k:(a + 1) * k] for a in range(T)))


def amalgamate(Z1: FiniteMetricSpace, e1, Z2: FiniteMetricSpace, e2):
    """Glue Z1 and Z2 along a shared subspace embedded by index arrays e1, e2."""
    e1 = np.asarray(e1)
    e2 = np.asarray(e2)
    cross = (Z1.dist[:, e1][:, :, None] + Z2.dist[e2, :][None, :, :]).min(axis=1)
    labels = [("L", l) for l in Z1.labels] + [("R", l) for l in Z2.labels]
    Z, cmap = _glue_block(labels, _block(Z1.dist, cross, Z2.dist))
    n1 = len(Z1)
    return Z, cmap[:n1], cmap[n1:]


@dataclass(frozen=True)
class ChainGlue:
    space: FiniteMetricSpace
    embeddings: tuple
    failures: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.failures


def chain_glue(spaces, correspondences, rho=None, times=None, tol: float = TOL) -> ChainGlue:
    """Glue consecutive spaces along their correspondences, one after another.

    With ``rho`` and ``times`` supplied, every pairwise Hausdorff distance
    between embedded copies is compared with ``|t_i - t_j| * rho`` and the
    failing index pairs are listed.
    """
    if len(correspondences) != len(spaces) - 1:
        raise ValueError("one correspondence per consecutive pair of spaces")
    Z = spaces[0]
    embs = [np.arange(len(Z))]
    for i, R in enumerate(correspondences):
        W = glue_via_correspondence(spaces[i], spaces[i + 1], R)
        Z, m1, m2 = amalgamate(Z, embs[i], W.space, W.embeddings[0])
        embs = [m1[e] for e in embs] + [m2[W.embeddings[1]]]
    failures = []
    if rho is not None and times is not None:
        t = tolerance_for(Z.dist, tol)
        for i, j in itertools.combinations(range(len(spaces)), 2):
            dh = hausdorff_distance(Z, embs[i], embs[j])
            if abs(dh - abs(times[j] - times[i]) * rho) > t:
                failures.append((i, j, dh))
    return ChainGlue(Z, tuple(embs), tuple(failures))


# ---------------------------------------------------------- certification

@dataclass(frozen=True)
class PairCertificate:
    s: object
    t: object
    bound: object
    target: object
    witness: tuple
    source: str
    status: str


@dataclass(frozen=True)
class CertificateReport:
    ok: bool
    endpoint_value: object
    pairs: tuple
    forced_equality: bool
    note: str = ""

    @property
    def failures(self):
        return tuple(p for p in self.pairs if p.status != "certified")


def nearest_point_correspondence(Z: FiniteMetricSpace, A, B) -> Correspondence:
    """Each point of A paired with its nearest point of B and vice versa (lowest index on ties)."""
    A = np.asarray(A)
    B = np.asarray(B)
    d = Z.dist[np.ix_(A, B)]
    pairs = {(a, int(np.argmin(d[a]))) for a in range(len(A))}
    pairs |= {(int(np.argmin(d[:, b])), b) for b in range(len(B))}
    return Correspondence(tuple(pairs), len(A), len(B))


def _witnesses(g: GeodesicSampling, i: int, j: int, guard: int):
    X, Y = g.spaces[i], g.spaces[j]
    if g.dynamic is not None:
        try:
            yield "dynamic", Correspondence(tuple(g.dynamic.project(i, j)), len(X), len(Y))
        except ValueError:
            pass
    if g.ambient is not None:
        yield "ambient", nearest_point_correspondence(g.ambient.space, g.ambient.embeddings[i], g.ambient.embeddings[j])
    try:
        yield "search", gh_exact(X, Y, guard)[1]
    except SizeGuardExceeded:
        return


def certify_gh_geodesic(g: GeodesicSampling, tol: float = TOL, guard: int = SEARCH_GUARD) -> CertificateReport:
    """Find, for every sampled pair, a correspondence with dis/2 <= |s - t| rho + tol.

    Witnesses are tried in order: the dynamic correspondence, the nearest-point
    correspondence in the ambient space, then exact search on small slices.
    """
    rho = g.endpoint_value
    if rho is None:
        rho = gh_exact(g.spaces[0], g.spaces[-1], guard)[0]
    times = g.times
    tol = tolerance_for(g.spaces[0].dist, tol)

    def certify_pair(ij):
        i, j = ij
        target = abs(times[j] - times[i]) * rho
        best = None
        for source, R in _witnesses(g, i, j, guard):
            bound = distortion(g.spaces[i], g.spaces[j], R) / 2
            if best is None or bound < best[0]:
                best = (bound, R, source)
            if bound <= target + tol:
                break
        if best is None:
            return PairCertificate(times[i], times[j], None, target, (), "none", "no witness")
        bound, R, source = best
        status = "certified" if bound <= target + tol else "failed"
        return PairCertificate(times[i], times[j], bound, target, R.pairs, source, status)

    index_pairs = list(itertools.combinations(range(len(times)), 2))
    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            pairs = tuple(pool.map(certify_pair, index_pairs))
    else:
        pairs = tuple(map(certify_pair, index_pairs))
    ok = all(p.status == "certified" for p in pairs)
    note = (
        "every sampled pair is within |s - t| rho; with the exact endpoint value the "
        "triangle inequality forces equality" if ok else "certificate failed"
    )
    return CertificateReport(ok, rho, pairs, ok, note)


@dataclass(frozen=True)
class DynamicReport:
    ok: bool
    entries: tuple  # (s, t, surjective, distortion, target, ok)


def check_dynamic(dc: DynamicCorrespondence, g: GeodesicSampling, tol: float = TOL) -> DynamicReport:
    T = len(g.times)
    if any(len(tup) != T for tup in dc.tuples):
        raise ValueError("every tuple needs one coordinate per sampled time")
    rho = g.endpoint_value
    if rho is None:
        rho = gh_exact(g.spaces[0], g.spaces[-1])[0]
    tol = tolerance_for(g.spaces[0].dist, tol)
    entries = []
    for i, j in itertools.combinations(range(T), 2):
        X, Y = g.spaces[i], g.spaces[j]
        pairs = dc.project(i, j)
        target = 2 * abs(g.times[j] - g.times[i]) * rho
        try:
            R = Correspondence(tuple(pairs), len(X), len(Y))
        except ValueError:
            entries.append((g.times[i], g.times[j], False, None, target, False))
            continue
        dis = distortion(X, Y, R)
        entries.append((g.times[i], g.times[j], True, dis, target, bool(abs(dis - target) <= tol)))
    return DynamicReport(all(e[-1] for e in entries), tuple(entries))


# ---------------------------------------------------- three-way relations

@dataclass(frozen=True)
class TripleSearch:
    found: bool
    relation: Optional[tuple]
    values: tuple = field(default=())


def triple_correspondence_search(X1, X2, X3, guard: int = 4) -> TripleSearch:
    """Look for R in X1 x X2 x X3 whose three pairwise projections are optimal."""
    spaces = (X1, X2, X3)
    if max(map(len, spaces)) > guard:
        raise SizeGuardExceeded(f"triple search limited to {guard} points per space")
    r12 = gh_exact(X1, X2)[0]
    r23 = gh_exact(X2, X3)[0]
    r13 = gh_exact(X1, X3)[0]
    tol = tolerance_for(X1.dist)
    nodes = list(itertools.product(*(range(len(S)) for S in spaces)))
    T = np.asarray(nodes)
    d1 = X1.dist[np.ix_(T[:, 0], T[:, 0])]
    d2 = X2.dist[np.ix_(T[:, 1], T[:, 1])]
    d3 = X3.dist[np.ix_(T[:, 2], T[:, 2])]
    compat = (
        np.asarray(np.abs(d1 - d2) <= 2 * r12 + tol, dtype=bool)
        & np.asarray(np.abs(d2 - d3) <= 2 * r23 + tol, dtype=bool)
        & np.asarray(np.abs(d1 - d3) <= 2 * r13 + tol, dtype=bool)
    )
    n1, n2 = len(X1), len(X2)
    covers = [(a, n1 + b, n1 + n2 + c) for a, b, c in nodes]
    chosen = covering_clique(compat, covers, n1 + n2 + len(X3))
    relation = None if chosen is None else tuple(nodes[k] for k in chosen)
    return TripleSearch(chosen is not None, relation, (r12, r23, r13))
