"""Acceptance criteria, one test each; a PASS/FAIL line per criterion is printed in the terminal summary."""

import itertools
import math
import time
from fractions import Fraction

import numpy as np

from conftest import ACCEPTANCE
from metric_geodesy.gh import (
    Correspondence,
    certify_gh_geodesic,
    chain_glue,
    check_dynamic,
    dyadic_times,
    gh_exact,
    straight_line_gh_geodesic,
)
from metric_geodesy.gw import (
    branching_coupling,
    branching_family,
    deviant_coupling,
    deviant_family,
    gw_alternating_min,
    gw_delta_lower_bound,
    h_profile,
    one_point_vs_two_point,
    straight_line_gw_geodesic,
    validate_metric_coupling,
)
from metric_geodesy.interpolation import (
    certify_hausdorff_geodesic,
    geodesic_only_reach,
    interpolation_equals_thickening,
    lipschitz_reach,
    sampled_geodesic,
    sphere_example,
    square_example,
    strip_counterexample,
    thickening_geodesic,
)
from metric_geodesy.proper import ProperFunction, generalized_inverse
from metric_geodesy.spaces import (
    MetricMeasureSpace,
    cycle,
    grid,
    hausdorff_distance,
    segment,
    simplex,
    thicken,
    validate_metric,
)
from metric_geodesy.transport import (
    coupling_cost,
    hyperspace_hausdorff_check,
    interpolation_coupling,
    linear_interpolation,
    transport_lp,
    wasserstein_p,
)

import oracles


def record(key, ok, detail):
    ACCEPTANCE[key] = (bool(ok), detail)
    print(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_criterion_01_simplex_gw_value():
    start = time.perf_counter()
    worst = 0.0
    for n, p in itertools.product(range(2, 7), (1, 2)):
        r = gw_alternating_min(simplex(1, measure=True), simplex(n, measure=True), p)
        worst = max(worst, abs(r.value - 0.5))
        assert gw_delta_lower_bound(n, p) == 0.5
    elapsed = time.perf_counter() - start
    record(1, worst <= 1e-9 and elapsed < 10, f"max |upper - 0.5| = {worst:.2e}, lower bound 0.5, {elapsed:.2f}s")


def test_criterion_02_sphere_geodesic():
    start = time.perf_counter()
    S = sphere_example(360)
    tol = 4 * math.pi / 360
    close = abs(S.d_h - math.pi / 2) <= 2 * math.pi / 360 and abs(S.d_gh - math.pi / 2) <= 2 * math.pi / 360
    times = tuple(k / 10 for k in range(11))
    slices = [thickening_geodesic(S.X, S.A, S.B, t) for t in times]
    hrep = certify_hausdorff_geodesic(S.X, slices, times, tol=tol)
    grep = certify_gh_geodesic(sampled_geodesic(S.X, slices, times, S.d_gh), tol=tol)
    elapsed = time.perf_counter() - start
    record(2, close and hrep.ok and grep.ok and elapsed < 30,
           f"d_H = {S.d_h:.6f}, d_GH = {S.d_gh:.6f}, Hausdorff cert {hrep.ok}, GH cert {grep.ok}, {elapsed:.2f}s")


def test_criterion_03_straight_line_gh():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    times = dyadic_times(10)
    for _ in range(25):
        X = oracles.euclidean_space(rng, int(rng.integers(1, 6)))
        Y = oracles.euclidean_space(rng, int(rng.integers(1, 6)))
        rho, R = gh_exact(X, Y)
        g = straight_line_gh_geodesic(X, Y, R, times, verify=False)
        for i, j in itertools.combinations(range(len(times)), 2):
            value, _ = gh_exact(g.spaces[i], g.spaces[j], guard=12)
            worst = max(worst, abs(value - (times[j] - times[i]) * rho))
    elapsed = time.perf_counter() - start
    record(3, worst <= 1e-9 and elapsed < 60, f"max |d_GH - |s-t| rho| = {worst:.2e} over 25 pairs, {elapsed:.2f}s")


def _exact_cost(cross, plan, p):
    return coupling_cost(np.vectorize(lambda v: v ** p, otypes=[object])(cross), plan)


def _marginals(plan, a, b):
    return list(plan.sum(axis=1)) == list(a) and list(plan.sum(axis=0)) == list(b)


def test_criterion_04_appendix_identities():
    n, m = 3, 2
    times = dyadic_times(8, exact=True)
    params = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))
    checks = 0
    bad = []
    straight = straight_line_gw_geodesic(
        simplex(1, measure=True, exact=True), simplex(n, measure=True, exact=True),
        np.full((1, n), Fraction(1, 2), dtype=object), np.full((1, n), Fraction(1, n), dtype=object), times)
    for v in params:
        dev = [deviant_family(n, m, v, t) for t in times]
        br = [branching_family(n, v, t) for t in times]
        for t, X in zip(times, dev + br):
            checks += 1
            if not validate_metric(X.dist, 0).ok:
                bad.append(("slice", v, t))
        for t, X in zip(times, dev):
            if 0 < t < 1 and len(X) != n + m:
                bad.append(("deviant size", v, t))
        for t, X, Z in zip(times, br, straight.spaces):
            if 0 < t <= v and not (np.array_equal(X.dist, Z.dist) and np.array_equal(X.mass, Z.mass)):
                bad.append(("branching prefix", v, t))
        for (i, s), (j, t) in itertools.combinations(enumerate(times), 2):
            for family, slices, coupling in (("deviant", dev, lambda s, t: deviant_coupling(n, m, v, s, t)),
                                             ("branching", br, lambda s, t: branching_coupling(n, v, s, t))):
                cross, plan = coupling(s, t)
                Xs, Xt = slices[i], slices[j]
                checks += 1
                if not validate_metric_coupling(Xs.space, Xt.space, cross, 0).ok:
                    bad.append((family, "coupling", v, s, t))
                if not _marginals(plan, Xs.mass, Xt.mass):
                    bad.append((family, "marginals", v, s, t))
                for p in (1, 2):
                    if _exact_cost(cross, plan, p) != ((t - s) / 2) ** p:
                        bad.append((family, "cost", p, v, s, t))
    record(4, not bad, f"{checks} exact slice/coupling checks, failures: {bad[:3]}")


def test_criterion_05_w1_interpolation():
    rng = np.random.default_rng(5)
    grid6 = [k / 5 for k in range(6)]
    worst = 0.0
    exact_ok = True
    for _ in range(50):
        Z = oracles.euclidean_space(rng, int(rng.integers(2, 21)))
        a, b = rng.dirichlet(np.ones(len(Z))), rng.dirichlet(np.ones(len(Z)))
        rho, mu = wasserstein_p(Z, a, b)
        for s, t in itertools.combinations(grid6, 2):
            d = wasserstein_p(Z, linear_interpolation(a, b, s), linear_interpolation(a, b, t))[0]
            worst = max(worst, abs(d - (t - s) * rho))
        Zq = Z.to_exact()
        muq = np.vectorize(Fraction, otypes=[object])(mu)
        aq, bq = muq.sum(axis=1), muq.sum(axis=0)
        base = coupling_cost(Zq.dist, muq)
        for s, t in itertools.combinations([Fraction(k, 5) for k in range(6)], 2):
            pi = interpolation_coupling(aq, bq, muq, s, t)
            exact_ok &= coupling_cost(Zq.dist, pi) == (t - s) * base
            exact_ok &= list(pi.sum(axis=1)) == list(linear_interpolation(aq, bq, s))
    record(5, worst <= 1e-8 and exact_ok, f"max W1 deviation {worst:.2e}, exact coupling identity {exact_ok}")


def test_criterion_06_hyperspace_sandwich():
    rng = np.random.default_rng(6)
    outside = 0
    runs = 0
    for _ in range(20):
        n = int(rng.integers(2, 13))
        Z = oracles.euclidean_space(rng, n)
        perm = rng.permutation(n)
        k = int(rng.integers(1, n))
        X, Y = perm[:k].tolist(), perm[k:].tolist()
        if rng.random() < 0.5:
            Y = Y + perm[:int(rng.integers(0, k + 1))].tolist()
        for p in (1.0, 2.0):
            eps = 0.05 * float(Z.diameter())
            rep = hyperspace_hausdorff_check(Z, X, Y, p, eps, 50, seed=int(rng.integers(1 << 30)))
            runs += 1
            if not (rep.eta - 1e-9 <= rep.estimate <= rep.eta + eps) or not rep.ok:
                outside += 1
    record(6, outside == 0, f"{runs} runs, {outside} estimates outside [d_H, d_H + eps]")


def test_criterion_07_interpolation_equals_thickening():
    cases = {
        "segment": (segment(81), list(range(9)), list(range(72, 81))),
        "cycle C_64": (cycle(64), list(range(9)) + list(range(56, 64)), list(range(24, 41))),
    }
    G = grid(41, 21)
    P = np.asarray(G.labels)
    cases["grid 41x21"] = (G, np.flatnonzero(P[:, 0] <= 8).tolist(), np.flatnonzero(P[:, 0] >= 32).tolist())
    summary = []
    ok = True
    for name, (X, A, B) in cases.items():
        rep = interpolation_equals_thickening(X, A, B, K=8, slack=0)
        gap = max(l.hausdorff for l in rep.layers)
        nonempty = all(l.evaluation_size > 0 and l.thickening_size > 0 for l in rep.layers)
        ok &= rep.ok and nonempty and gap <= X.mesh
        summary.append(f"{name}: gap {gap:g}")
    record(7, ok, "; ".join(summary))


def test_criterion_08_counterexamples():
    strip = strip_counterexample(0.05)
    s, t, d, bound = strip.witness
    strip_ok = strip.violation and abs(d - math.sqrt(1.25)) <= 0.02 and bound == 0.5 and strip.endpoint_ok
    sq = square_example(0.1)
    lip = lipschitz_reach(sq.X, sq.A, sq.B, sq.rho, K=8)
    geo = geodesic_only_reach(sq.X, sq.A, sq.B, sq.rho, K=8)
    square_ok = sq.probe in lip.evaluation[4] and sq.probe not in geo.evaluation[4]
    ident = ProperFunction.identity()
    bounded_ok = True
    for tt in (0.5, 0.1, 0.01):
        w = one_point_vs_two_point(tt, ident)
        bounded_ok &= abs(w.eta_lower - 0.5) <= 1e-9 and abs(w.delta - tt / 2) <= 1e-9 and w.fails
    record(8, strip_ok and square_ok and bounded_ok,
           f"strip d = {d:.4f} > {bound}; (0,2) Lipschitz-only {square_ok}; boundedness fails {bounded_ok}")


def test_criterion_09_oracles():
    rng = np.random.default_rng(9)
    lp_worst = 0.0
    for _ in range(100):
        n, m = (int(v) for v in rng.integers(1, 5, size=2))
        C = rng.random((n, m))
        a, b = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(m))
        lp_worst = max(lp_worst, abs(transport_lp(C, a, b)[0] - oracles.transport_vertices(C, a, b)))
    gh_bad = 0
    for _ in range(100):
        X = oracles.integer_space(rng, int(rng.integers(1, 5)))
        Y = oracles.integer_space(rng, int(rng.integers(1, 5)))
        gh_bad += gh_exact(X, Y)[0] != oracles.gh_bruteforce(X, Y)
    h_bad = 0
    for _ in range(30):
        X = oracles.rational_space(rng, int(rng.integers(1, 8)))
        w = rng.integers(1, 6, size=len(X))
        mass = [Fraction(int(v), int(w.sum())) for v in w]
        h = h_profile(MetricMeasureSpace(X, mass))
        h_bad += sum(v != oracles.ball_profile(X.dist, mass, r) for r, v in zip(h.radii, h.values))
    record(9, lp_worst <= 1e-10 and gh_bad == 0 and h_bad == 0,
           f"LP vs vertices {lp_worst:.1e}; GH mismatches {gh_bad}/100; h-profile mismatches {h_bad}")


def test_criterion_10_property_suites():
    rng = np.random.default_rng(10)
    counts = dict.fromkeys(["metric", "triangle", "inverse", "thickening", "dynamic", "chain"], 0)
    failures = []

    for _ in range(100):  # metric axioms: validator agrees with a direct triple loop
        n = int(rng.integers(2, 7))
        d = rng.integers(1, 6, size=(n, n)).astype(float)
        d = np.triu(d, 1) + np.triu(d, 1).T
        direct = all(d[i, k] <= d[i, j] + d[j, k] for i, j, k in itertools.product(range(n), repeat=3))
        counts["metric"] += 1
        if validate_metric(d).ok != direct:
            failures.append(("metric", d))

    for _ in range(50):  # triangle inequality for d_GH and W_p
        X, Y, Z = (oracles.euclidean_space(rng, int(rng.integers(1, 5))) for _ in range(3))
        counts["triangle"] += 1
        if gh_exact(X, Z)[0] > gh_exact(X, Y)[0] + gh_exact(Y, Z)[0] + 1e-12:
            failures.append(("gh triangle",))
        W = oracles.euclidean_space(rng, int(rng.integers(1, 8)))
        a, b, c = (rng.dirichlet(np.ones(len(W))) for _ in range(3))
        p = float(rng.choice([1.0, 2.0]))
        counts["triangle"] += 1
        if wasserstein_p(W, a, c, p)[0] > wasserstein_p(W, a, b, p)[0] + wasserstein_p(W, b, c, p)[0] + 1e-9:
            failures.append(("wp triangle",))

    for _ in range(100):  # generalized inverse clauses
        k = int(rng.integers(1, 5))
        xs = np.concatenate([[0], np.cumsum(rng.uniform(0.1, 1, k))])
        ys = np.concatenate([[0], np.cumsum(np.round(rng.uniform(0, 1, k) * (rng.random(k) > 0.3), 6))])
        f = ProperFunction(tuple(zip(xs, ys)), float(rng.choice([0.0, 1.0])))
        x, y = rng.uniform(0, 5, 2)
        g = generalized_inverse(f, y)
        counts["inverse"] += 1
        if (f(x) >= y) != (x >= g) and abs(x - g) > 1e-9 or generalized_inverse(f, f(x)) > x + 1e-9:
            failures.append(("inverse", f, x, y))

    for _ in range(100):  # thickening algebra on a geodesic carrier, mesh slack
        X = cycle(int(rng.integers(6, 30)))
        n = len(X)
        A = rng.choice(n, size=int(rng.integers(1, 4)), replace=False).tolist()
        B = rng.choice(n, size=int(rng.integers(1, 4)), replace=False).tolist()
        r, s = rng.uniform(0, n / 4, 2)
        counts["thickening"] += 1
        if not thicken(X, thicken(X, A, r), s) <= thicken(X, A, r + s):
            failures.append(("thicken compose",))
        if not thicken(X, A, r + s) <= thicken(X, thicken(X, A, r + X.mesh), s):
            failures.append(("thicken cover",))
        rho = hausdorff_distance(X, A, B)
        for t in (0.25, 0.5, 0.75):
            if not thicken(X, A, t * rho + X.mesh) & thicken(X, B, (1 - t) * rho + X.mesh):
                failures.append(("thicken meet",))

    times = dyadic_times(4)
    for _ in range(50):  # dynamic optimal correspondences of straight lines
        X = oracles.euclidean_space(rng, int(rng.integers(1, 5)))
        Y = oracles.euclidean_space(rng, int(rng.integers(1, 5)))
        rho, R = gh_exact(X, Y)
        g = straight_line_gh_geodesic(X, Y, R, times, verify=False)
        counts["dynamic"] += 1
        rep = check_dynamic(g.dynamic, g)
        if not rep.ok:
            failures.append(("dynamic", rep))
        for i, j in ((0, 2), (1, 3)):
            if abs(gh_exact(g.spaces[i], g.spaces[j], 12)[0] - (times[j] - times[i]) * rho) > 1e-9:
                failures.append(("dynamic optimality",))

    for _ in range(50):  # chain gluing realizes every pairwise distance
        X = oracles.euclidean_space(rng, int(rng.integers(1, 4)))
        Y = oracles.euclidean_space(rng, int(rng.integers(1, 4)))
        rho, R = gh_exact(X, Y)
        g = straight_line_gh_geodesic(X, Y, R, times, verify=False)
        corr = [Correspondence(tuple(g.dynamic.project(i, i + 1)), len(g.spaces[i]), len(g.spaces[i + 1]))
                for i in range(len(times) - 1)]
        counts["chain"] += 1
        if not chain_glue(list(g.spaces), corr, rho, times).ok:
            failures.append(("chain",))

    total = sum(counts.values())
    record(10, total >= 500 and not failures, f"{total} randomized cases {counts}, failures {len(failures)}")
