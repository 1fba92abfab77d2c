"""Gromov-Wasserstein distance through metric couplings.

A metric coupling between X and Y is a cross matrix D such that the block
matrix [[d_X, D], [D^T, d_Y]] is a (pseudo)metric. Any such D together with a
measure coupling gives an upper bound on the distance; exact values are only
claimed where a matching lower bound is available.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog, minimize

from .gh import GeodesicSampling, gh_exact
from .proper import ProperFunction
from .spaces import (
    TOL,
    FiniteMetricSpace,
    MetricMeasureSpace,
    PseudoMetricSpace,
    ValidationReport,
    exact_array,
    hausdorff_distance,
    is_exact,
    validate_metric,
)
from .transport import coupling_cost, transport_lp


class InvalidCoupling(ValueError):
    pass


def block_matrix(X: FiniteMetricSpace, Y: FiniteMetricSpace, D) -> np.ndarray:
    D = np.asarray(D)
    if D.shape != (len(X), len(Y)):
        raise ValueError(f"cross matrix must be {len(X)}x{len(Y)}, got {D.shape}")
    dtype = object if object in (X.dist.dtype, Y.dist.dtype, D.dtype) else float
    top = np.concatenate([X.dist.astype(dtype), D.astype(dtype)], axis=1)
    bottom = np.concatenate([D.T.astype(dtype), Y.dist.astype(dtype)], axis=1)
    return np.concatenate([top, bottom], axis=0)


def validate_metric_coupling(X: FiniteMetricSpace, Y: FiniteMetricSpace, D, tolerance: float = TOL) -> ValidationReport:
    """Block triangle check; zero cross entries are allowed (pseudometric gluing)."""
    return validate_metric(block_matrix(X, Y, D), tolerance, pseudo=True)


def block_space(X, Y, D) -> PseudoMetricSpace:
    labels = [("X", l) for l in X.labels] + [("Y", l) for l in Y.labels]
    return PseudoMetricSpace(tuple(labels), block_matrix(X, Y, D))


def wp_cost(D, plan, p):
    """sum plan * D^p (exact for Fraction input) and its p-th root as a float."""
    p = int(p) if float(p).is_integer() else p
    total = coupling_cost(np.asarray(D) ** p if np.asarray(D).dtype != object else _power(D, p), plan)
    return total, float(total) ** (1.0 / p)


def _power(D, p):
    out = np.empty(np.asarray(D).shape, dtype=object)
    for idx in np.ndindex(out.shape):
        out[idx] = np.asarray(D)[idx] ** p
    return out


def gw_upper_bound(Xm: MetricMeasureSpace, Ym: MetricMeasureSpace, D, p: float = 1.0, check: bool = True):
    """W_p between the two measures inside the block metric given by D."""
    if check and not validate_metric_coupling(Xm.space, Ym.space, D).ok:
        raise InvalidCoupling("cross matrix is not a metric coupling")
    Df = np.asarray(D, dtype=float)
    cost, plan = transport_lp(Df ** p, np.asarray(Xm.mass, dtype=float), np.asarray(Ym.mass, dtype=float))
    return max(cost, 0.0) ** (1.0 / p), plan


# -------------------------------------------------- alternating minimization

def coupling_constraints(dX: np.ndarray, dY: np.ndarray):
    """Rows of A @ vec(D) <= b describing all block triangle inequalities."""
    n, m = dX.shape[0], dY.shape[0]
    rows, rhs = [], []

    def var(x, y):
        return x * m + y

    for y in range(m):
        for x, x2 in itertools.permutations(range(n), 2):
            r = np.zeros(n * m)
            r[var(x, y)], r[var(x2, y)] = 1, -1
            rows.append(r)
            rhs.append(dX[x, x2])
            if x < x2:
                r = np.zeros(n * m)
                r[var(x, y)] = r[var(x2, y)] = -1
                rows.append(r)
                rhs.append(-dX[x, x2])
    for x in range(n):
        for y, y2 in itertools.permutations(range(m), 2):
            r = np.zeros(n * m)
            r[var(x, y)], r[var(x, y2)] = 1, -1
            rows.append(r)
            rhs.append(dY[y, y2])
            if y < y2:
                r = np.zeros(n * m)
                r[var(x, y)] = r[var(x, y2)] = -1
                rows.append(r)
                rhs.append(-dY[y, y2])
    if not rows:
        return np.zeros((0, n * m)), np.zeros(0)
    return np.asarray(rows), np.asarray(rhs, dtype=float)


def _best_cross_p1(w, A, b):
    res = linprog(w, A_ub=A if len(b) else None, b_ub=b if len(b) else None, bounds=(0, None), method="highs-ds")
    if res.status != 0:
        raise RuntimeError(f"coupling LP failed: {res.message}")
    return res.x


def _best_cross_p2(w, A, b, x0):
    """min sum w x^2 over the coupling polytope: SLSQP, then an exact solve on its active set."""
    cons = [{"type": "ineq", "fun": lambda x: b - A @ x, "jac": lambda x: -A}] if len(b) else []
    res = minimize(
        lambda x: float(w @ x ** 2), x0, jac=lambda x: 2 * w * x, constraints=cons,
        bounds=[(0, None)] * len(x0), method="SLSQP", options={"ftol": 1e-15, "maxiter": 500},
    )
    x = np.clip(res.x, 0, None)
    best = x
    act_rows = [A[k] for k in range(len(b)) if A[k] @ x - b[k] > -1e-7]
    act_rhs = [b[k] for k in range(len(b)) if A[k] @ x - b[k] > -1e-7]
    for k in np.flatnonzero(x < 1e-7):
        e = np.zeros(len(x))
        e[k] = 1.0
        act_rows.append(e)
        act_rhs.append(0.0)
    if act_rows:
        Aa = np.asarray(act_rows)
        k = len(x)
        kkt = np.block([[np.diag(2 * w), Aa.T], [Aa, np.zeros((len(Aa), len(Aa)))]])
        sol = np.linalg.lstsq(kkt, np.concatenate([np.zeros(k), act_rhs]), rcond=None)[0][:k]
        feasible = np.all(sol >= -1e-12) and (not len(b) or np.all(A @ sol <= b + 1e-12))
        if feasible and w @ sol ** 2 <= w @ x ** 2 + 1e-12:
            best = np.clip(sol, 0, None)
    return best


@dataclass(frozen=True)
class AltMinResult:
    value: float
    cross: np.ndarray
    plan: np.ndarray
    history: tuple  # objective trace per restart


def _initial_cross(dX, dY, rng, restart):
    c0 = max(dX.max(), dY.max()) / 2
    n, m = dX.shape[0], dY.shape[0]
    if restart == 0:
        return np.full((n, m), c0)
    c = c0 * (1 + rng.random())
    u = rng.random() * dX[rng.integers(n)]
    v = rng.random() * dY[rng.integers(m)]
    return c + u[:, None] + v[None, :]


def gw_alternating_min(Xm: MetricMeasureSpace, Ym: MetricMeasureSpace, p: int = 1, restarts: int = 4,
                       iters: int = 30, seed: int = 0) -> AltMinResult:
    """Heuristic upper bound on d_GW,p: alternate optimal plan for fixed D and optimal D for the fixed plan.

    Each restart's objective never increases; the best restart wins with ties
    going to the lowest restart index.
    """
    if p not in (1, 2):
        raise ValueError("alternating minimization supports p in {1, 2}")
    dX = np.asarray(Xm.dist, dtype=float)
    dY = np.asarray(Ym.dist, dtype=float)
    a = np.asarray(Xm.mass, dtype=float)
    b = np.asarray(Ym.mass, dtype=float)
    A, rhs = coupling_constraints(dX, dY)
    rng = np.random.default_rng(seed)
    best = None
    traces = []
    for r in range(restarts):
        D = _initial_cross(dX, dY, rng, r)
        trace = []
        obj = math.inf
        for _ in range(iters):
            cost, plan = transport_lp(D ** p, a, b)
            trace.append(cost)
            assert cost <= obj + 1e-12, "objective increased"
            w = plan.ravel()
            x = _best_cross_p1(w, A, rhs) if p == 1 else _best_cross_p2(w, A, rhs, D.ravel())
            cand = x.reshape(D.shape)
            new = float((plan * cand ** p).sum())
            if new < cost - 1e-13:
                D = cand
                obj = new
            else:
                obj = cost
                break
        traces.append(tuple(trace))
        value = max(obj, 0.0) ** (1.0 / p)
        if best is None or value < best[0] - 1e-15:
            _, plan = transport_lp(D ** p, a, b)
            best = (value, D, plan)
    return AltMinResult(best[0], best[1], best[2], tuple(traces))


# ------------------------------------------------------- simplex bounds

def gw_delta_lower_bound(n: int, p: float = 1.0) -> float:
    """Lower bound 1/2 on d_GW,p between the one-point space and Delta_n, n >= 2."""
    if n < 2:
        raise ValueError("the bound applies to n >= 2 (Delta_1 is at distance 0 from itself)")
    if p < 1:
        raise ValueError("p must be at least 1")
    return 0.5


@dataclass(frozen=True)
class MeanChain:
    power_mean: float
    arithmetic_mean: float
    pair_average: float

    @property
    def ok(self) -> bool:
        return (self.power_mean >= self.arithmetic_mean - 1e-12
                and self.arithmetic_mean >= self.pair_average - 1e-12
                and self.pair_average >= 0.5 - 1e-12)


def power_mean_chain(cross_row, p: float) -> MeanChain:
    """Executable form of the bound for one point against Delta_n with uniform mass:
    power mean >= arithmetic mean = average of D_i + D_j over pairs / 2 >= 1/2."""
    D = np.asarray(cross_row, dtype=float).ravel()
    n = len(D)
    pm = float(np.mean(D ** p) ** (1.0 / p))
    am = float(D.mean())
    pairs = [D[i] + D[j] for i, j in itertools.combinations(range(n), 2)]
    pair_avg = float(np.mean(pairs)) / 2 if pairs else am
    return MeanChain(pm, am, pair_avg)


def gw1_one_point(Ym: MetricMeasureSpace):
    """Exact d_GW,1 between a one-point space and Ym (the coupling is forced), by LP over the cross row."""
    dY = np.asarray(Ym.dist, dtype=float)
    A, b = coupling_constraints(np.zeros((1, 1)), dY)
    x = _best_cross_p1(np.asarray(Ym.mass, dtype=float), A, b)
    return float(np.asarray(Ym.mass, dtype=float) @ x), x.reshape(1, -1)


# --------------------------------------------------- straight-line geodesics

def _num(exact):
    return (lambda v: Fraction(v)) if exact else float


def _matrix(rows, exact):
    return exact_array(rows) if exact else np.asarray(rows, dtype=float)


def _support(plan):
    plan = np.asarray(plan)
    return [(int(i), int(j)) for i, j in zip(*np.nonzero(plan > 0))]


def _slice_parts(n, m, support, t):
    if t == 0:
        return np.arange(n), None
    if t == 1:
        return None, np.arange(m)
    P = np.asarray(support)
    return P[:, 0], P[:, 1]


def straight_line_gw_geodesic(Xm, Ym, D, plan, times, p: float = 1.0, rho=None, certified=None):
    """t -> (supp plan, (1 - t) d_X + t d_Y, plan) with Xm and Ym at the endpoints.

    ``certified`` records whether (D, plan) is known to be optimal; None means
    the curve is conditional on that.
    """
    support = _support(plan)
    if not support:
        raise ValueError("empty coupling support")
    I = np.asarray([i for i, _ in support])
    J = np.asarray([j for _, j in support])
    plan = np.asarray(plan)
    spaces = []
    for t in times:
        if t == 0:
            spaces.append(Xm)
        elif t == 1:
            spaces.append(Ym)
        else:
            d = (1 - t) * Xm.dist[np.ix_(I, I)] + t * Ym.dist[np.ix_(J, J)]
            labels = tuple((Xm.space.labels[i], Ym.space.labels[j]) for i, j in support)
            spaces.append(MetricMeasureSpace(FiniteMetricSpace(labels, d), plan[I, J]))
    if rho is None:
        rho = wp_cost(D, plan, p)[1]
    return GeodesicSampling(tuple(times), tuple(spaces), rho, certified)


def straight_line_gw_coupling(Xm, Ym, D, plan, s, t):
    """Metric coupling and measure coupling between the straight-line slices at s < t.

    Cross distance (1 - t) d_X(x, x') + s d_Y(y, y') + (t - s) D(x, y'); the
    measure coupling pairs each support point with itself.
    """
    if not 0 <= s < t <= 1:
        raise ValueError("need 0 <= s < t <= 1")
    support = _support(plan)
    n, m = len(Xm), len(Ym)
    plan = np.asarray(plan)
    xs_s, ys_s = _slice_parts(n, m, support, s)
    xs_t, ys_t = _slice_parts(n, m, support, t)
    D = np.asarray(D)
    src = xs_s if xs_s is not None else np.asarray([i for i, _ in support])
    dst = ys_t if ys_t is not None else np.asarray([j for _, j in support])
    cross = (t - s) * D[np.ix_(src, dst)] if s != 0 or t != 1 else D
    if t != 1:
        cross = cross + (1 - t) * Xm.dist[np.ix_(src, xs_t)]
    if s != 0:
        cross = cross + s * Ym.dist[np.ix_(ys_s, dst)]
    k = len(support)
    rows_s = n if s == 0 else (m if s == 1 else k)
    rows_t = m if t == 1 else k
    coupling = np.zeros((rows_s, rows_t), dtype=plan.dtype)
    for r, (i, j) in enumerate(support):
        coupling[i if s == 0 else r, j if t == 1 else r] += plan[i, j]
    return cross, coupling


# ------------------------------------------------------ deviant family

def deviant_f(sigma, t):
    return t * sigma if t <= Fraction(1, 2) else sigma - t * sigma


def _exact_params(*vals):
    return any(isinstance(v, Fraction) for v in vals)


def _check_deviant(n, m, sigma):
    if not 1 <= m <= n:
        raise ValueError("need 1 <= m <= n")
    if not 0 < sigma <= 1:
        raise ValueError("sigma must lie in (0, 1]")


def deviant_mass(n, m, exact):
    num = _num(exact)
    return [num(Fraction(1, 2 * n)) if (i < m or n <= i < n + m) else num(Fraction(1, n)) for i in range(n + m)]


def deviant_family(n: int, m: int, sigma, t) -> MetricMeasureSpace:
    """Slice at time t of the deviant curve from the one-point space to Delta_n."""
    _check_deviant(n, m, sigma)
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    exact = _exact_params(sigma, t)
    from .spaces import simplex

    if t == 0:
        return simplex(1, measure=True, exact=exact)
    if t == 1:
        return simplex(n, measure=True, exact=exact)
    f = deviant_f(sigma, t)
    rows = [[0 if i == j else f if abs(i - j) == n else t for j in range(n + m)] for i in range(n + m)]
    X = FiniteMetricSpace(tuple(f"x{i + 1}" for i in range(n + m)), _matrix(rows, exact))
    return MetricMeasureSpace(X, _matrix(deviant_mass(n, m, exact), exact))


def deviant_coupling(n: int, m: int, sigma, s, t):
    """Explicit metric coupling and measure coupling between deviant slices s < t."""
    _check_deviant(n, m, sigma)
    if not 0 <= s < t <= 1:
        raise ValueError("need 0 <= s < t <= 1")
    exact = _exact_params(sigma, s, t)
    N = n + m
    mass = deviant_mass(n, m, exact)
    if s == 0:
        k = n if t == 1 else N
        target = [Fraction(1, n)] * n if t == 1 else mass
        cross = [[t / 2] * k]
        plan = [list(target)]
    elif t == 1:
        cross = [[(1 - s) / 2 if i % n == j else (1 + s) / 2 for j in range(n)] for i in range(N)]
        plan = [[mass[i] if i % n == j else 0 for j in range(n)] for i in range(N)]
    else:
        fs, ft = deviant_f(sigma, s), deviant_f(sigma, t)
        half = abs(t - s) / 2

        def entry(i, j):
            if i == j:
                return half
            if abs(i - j) == n:
                return half + min(fs, ft)
            return (s + t) / 2

        cross = [[entry(i, j) for j in range(N)] for i in range(N)]
        plan = [[mass[i] if i == j else 0 for j in range(N)] for i in range(N)]
    return _matrix(cross, exact), _matrix(plan, exact)


# ------------------------------------------------------ branching family

def branching_mass(n, exact):
    num = _num(exact)
    return [num(Fraction(1, n))] * (n - 1) + [num(Fraction(1, 2 * n))] * 2


def branching_family(n: int, a, t) -> MetricMeasureSpace:
    """Slice at time t of the curve that follows the straight line up to time a
    and then splits the last point in two."""
    if not 0 < a < 1:
        raise ValueError("a must lie in (0, 1)")
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    exact = _exact_params(a, t)
    from .spaces import simplex

    if t == 0:
        return simplex(1, measure=True, exact=exact)
    if t <= a:
        rows = [[0 if i == j else t for j in range(n)] for i in range(n)]
        X = FiniteMetricSpace(tuple(f"x{i + 1}" for i in range(n)), _matrix(rows, exact))
        return MetricMeasureSpace(X, _matrix([Fraction(1, n)] * n, exact))
    N = n + 1

    def entry(i, j):
        if i == j:
            return 0
        if {i, j} == {n - 1, n}:
            return t - a
        return t

    rows = [[entry(i, j) for j in range(N)] for i in range(N)]
    X = FiniteMetricSpace(tuple(f"x{i + 1}" for i in range(N)), _matrix(rows, exact))
    return MetricMeasureSpace(X, _matrix(branching_mass(n, exact), exact))


def branching_coupling(n: int, a, s, t):
    if not 0 < a < 1:
        raise ValueError("a must lie in (0, 1)")
    if not 0 <= s < t <= 1:
        raise ValueError("need 0 <= s < t <= 1")
    exact = _exact_params(a, s, t)
    uniform = [Fraction(1, n)] * n
    split = [Fraction(1, n)] * (n - 1) + [Fraction(1, 2 * n)] * 2
    half = (t - s) / 2
    if s == 0:
        cross = [[t / 2] * (n if t <= a else n + 1)]
        plan = [uniform if t <= a else split]
    elif t <= a:
        cross = [[half if i == j else (s + t) / 2 for j in range(n)] for i in range(n)]
        plan = [[uniform[i] if i == j else 0 for j in range(n)] for i in range(n)]
    elif s <= a:
        def parent(j):
            return min(j, n - 1)

        cross = [[half if i == parent(j) else (s + t) / 2 for j in range(n + 1)] for i in range(n)]
        plan = [[split[j] if i == parent(j) else 0 for j in range(n + 1)] for i in range(n)]
    else:
        def entry(i, j):
            if i == j:
                return half
            if {i, j} == {n - 1, n}:
                return (t + s) / 2 - a
            return (t + s) / 2

        cross = [[entry(i, j) for j in range(n + 1)] for i in range(n + 1)]
        plan = [[split[i] if i == j else 0 for j in range(n + 1)] for i in range(n + 1)]
    return _matrix(cross, exact), _matrix(plan, exact)


# ----------------------------------------------------------- certificates

@dataclass(frozen=True)
class GWPairCertificate:
    s: object
    t: object
    cross: np.ndarray
    plan: np.ndarray


@dataclass(frozen=True)
class GWReport:
    ok: bool
    endpoint_value: object
    entries: tuple  # (s, t, coupling_valid, marginals_ok, cost, target, status)
    forced_equality: bool


def _marginals_ok(plan, a, b, tol):
    plan = np.asarray(plan)
    rows = plan.sum(axis=1)
    cols = plan.sum(axis=0)
    return all(abs(x - y) <= tol for x, y in zip(rows, a)) and all(abs(x - y) <= tol for x, y in zip(cols, b))


def exact_root(value: Fraction, p: int):
    """p-th root of a Fraction when it is a perfect power, else a float."""
    if isinstance(value, Fraction) and float(p).is_integer():
        p = int(p)
        num = round(value.numerator ** (1.0 / p))
        den = round(value.denominator ** (1.0 / p))
        for a_ in (num - 1, num, num + 1):
            for b_ in (den - 1, den, den + 1):
                if a_ >= 0 and b_ > 0 and Fraction(a_, b_) ** p == value:
                    return Fraction(a_, b_)
    return float(value) ** (1.0 / p)


def certify_gw_geodesic(curve: GeodesicSampling, certificates, p: float = 1.0, tol: float = TOL) -> GWReport:
    """Check every certificate: valid metric coupling, correct marginals and
    cost at most |s - t| rho (compared in p-th powers, exactly for Fraction data)."""
    rho = curve.endpoint_value
    if rho is None:
        raise ValueError("certification needs the exact endpoint value")
    index = {t: k for k, t in enumerate(curve.times)}
    entries = []
    for cert in certificates:
        Xs, Xt = curve.spaces[index[cert.s]], curve.spaces[index[cert.t]]
        exact = is_exact(cert.cross) and Xs.exact and Xt.exact
        ttol = 0 if exact else tol
        valid = validate_metric_coupling(Xs.space, Xt.space, cert.cross, tol).ok
        marg = _marginals_ok(cert.plan, Xs.mass, Xt.mass, ttol)
        total, _ = wp_cost(cert.cross, cert.plan, p)
        target = abs(cert.t - cert.s) * rho
        ok = valid and marg and total <= target ** p + ttol
        cost = exact_root(total, p) if exact else float(total) ** (1.0 / p)
        entries.append((cert.s, cert.t, valid, marg, cost, target, "certified" if ok else "failed"))
    ok = bool(entries) and all(e[-1] == "certified" for e in entries)
    return GWReport(ok, rho, tuple(entries), ok)


def family_certificates(kind: str, times, n: int, m: int = 1, sigma=None, a=None):
    """Certificates for every pair of sampled times of the deviant or branching curve."""
    certs = []
    for s, t in itertools.combinations(times, 2):
        if kind == "deviant":
            cross, plan = deviant_coupling(n, m, sigma, s, t)
        elif kind == "branching":
            cross, plan = branching_coupling(n, a, s, t)
        else:
            raise ValueError(f"unknown family {kind!r}")
        certs.append(GWPairCertificate(s, t, cross, plan))
    return tuple(certs)


def family_curve(kind: str, times, n: int, m: int = 1, sigma=None, a=None) -> GeodesicSampling:
    exact = _exact_params(*times, *(v for v in (sigma, a) if v is not None))
    if kind == "deviant":
        spaces = tuple(deviant_family(n, m, sigma, t) for t in times)
    elif kind == "branching":
        spaces = tuple(branching_family(n, a, t) for t in times)
    else:
        raise ValueError(f"unknown family {kind!r}")
    rho = Fraction(1, 2) if exact else 0.5
    return GeodesicSampling(tuple(times), spaces, rho, True)


# ------------------------------------------------------------ boundedness

@dataclass(frozen=True)
class HProfile:
    radii: tuple
    values: tuple

    def __call__(self, eps):
        k = int(np.searchsorted(np.asarray(self.radii, dtype=float), float(eps), side="right")) - 1
        if k < 0:
            raise ValueError("radius must be nonnegative")
        return self.values[k]


def h_profile(Xm: MetricMeasureSpace) -> HProfile:
    """eps -> min over x of the mass of the closed eps-ball at x, as a step function."""
    d = np.asarray(Xm.dist)
    mass = np.asarray(Xm.mass)
    radii = sorted(set(d.ravel().tolist()))
    if d.dtype == object:
        values = [min(sum(w for w, dx in zip(mass, row) if dx <= r) for row in d) for r in radii]
    else:
        values = [float(((d <= r) * mass[None, :]).sum(axis=1).min()) for r in radii]
    return HProfile(tuple(radii), tuple(values))


def doubling_constant(Xm: MetricMeasureSpace) -> float:
    """max over x and r > 0 of mu(B_2r(x)) / mu(B_r(x)); only distances and half distances matter."""
    d = np.asarray(Xm.dist, dtype=float)
    mass = np.asarray(Xm.mass, dtype=float)
    C = 1.0
    radii = np.unique(np.concatenate([d.ravel(), d.ravel() / 2]))
    for r in radii[radii > 0]:
        small = ((d <= r + TOL) * mass).sum(axis=1)
        big = ((d <= 2 * r + TOL) * mass).sum(axis=1)
        C = max(C, float((big / small).max()))
    return C


def hausdorff_bound_function(h: ProperFunction, p: float = 1.0) -> ProperFunction:
    """Inverse of t -> (t/2) h(t/2)^(1/p) for strictly increasing h with values in [0, 1]."""
    if not h.strict:
        raise ValueError("h must be strictly increasing")
    if h.tail_slope != 0 or h.ys[-1] > 1:
        raise ValueError("h must take values in [0, 1] (bounded tail)")

    def htilde(t):
        return (t / 2) * h(t / 2) ** (1.0 / p)

    knots = list(2 * h.xs)
    cap = float(h.ys[-1]) ** (1.0 / p)
    model = ProperFunction.from_callable(htilde, knots, tail_slope=cap / 2)
    return model.inverse()


@dataclass(frozen=True)
class BoundednessCheck:
    eta: float
    delta: float
    f_delta: float
    ok: bool


def check_pair_hausdorff_bounded(Xm, Ym, D, f: ProperFunction, p: float = 1.0, tol: float = TOL) -> BoundednessCheck:
    """eta = Hausdorff distance of the two copies in the block metric, delta = W_p there; ok iff eta <= f(delta)."""
    Z = block_space(Xm.space, Ym.space, D)
    n = len(Xm)
    eta = float(hausdorff_distance(Z, range(n), range(n, n + len(Ym))))
    delta, _ = gw_upper_bound(Xm, Ym, D, p)
    fd = f(delta)
    return BoundednessCheck(eta, delta, fd, eta <= fd + tol)


def two_point_curve(t) -> MetricMeasureSpace:
    """Two points at distance 1 carrying masses 1 - t/2 and t/2."""
    if not 0 < t <= 1:
        raise ValueError("t must lie in (0, 1]")
    Y = FiniteMetricSpace(("y1", "y2"), np.array([[0.0, 1.0], [1.0, 0.0]]))
    return MetricMeasureSpace(Y, np.array([1 - t / 2, t / 2]))


@dataclass(frozen=True)
class NonBoundedWitness:
    t: float
    eta_lower: float  # d_GH: no common embedding gets the copies closer
    delta: float  # d_GW,1 from the one-point space
    coupling_eta: float  # Hausdorff distance inside the optimal metric coupling
    f_delta: float

    @property
    def fails(self) -> bool:
        return self.eta_lower > self.f_delta


def one_point_vs_two_point(t, f: ProperFunction) -> NonBoundedWitness:
    """Hausdorff-boundedness test for the one-point space against ``two_point_curve(t)``."""
    from .spaces import simplex

    Xm = simplex(1, measure=True)
    Ym = two_point_curve(t)
    eta, _ = gh_exact(Xm.space, Ym.space)
    delta, cross = gw1_one_point(Ym)
    Z = block_space(Xm.space, Ym.space, cross)
    coupling_eta = float(hausdorff_distance(Z, [0], [1, 2]))
    return NonBoundedWitness(float(t), float(eta), delta, coupling_eta, f(delta))
