from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metric_geodesy.spaces import (
    FiniteMetricSpace,
    MetricMeasureSpace,
    PseudoMetricSpace,
    as_subset,
    circle,
    covering_number,
    cycle,
    directed_hausdorff,
    distance_to_set,
    euclidean_grid,
    grid,
    hausdorff_distance,
    midpoint_defect,
    quotient_pseudometric,
    segment,
    simplex,
    strip,
    thicken,
    validate_metric,
)

import oracles


def test_simplex_distances():
    D = simplex(4)
    assert len(D) == 4
    assert D.diameter() == 1
    assert validate_metric(D.dist).ok


def test_exact_simplex_is_rational():
    D = simplex(3, measure=True, exact=True)
    assert D.exact
    assert list(D.mass) == [Fraction(1, 3)] * 3
    assert D.check_mass() == []


def test_triangle_violation_reported_with_triple():
    d = np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0]], dtype=float)
    rep = validate_metric(d)
    assert not rep.ok
    assert rep.first() == (0, 2, 1)


def test_exact_validation_has_no_tolerance():
    eps = Fraction(1, 10 ** 15)
    d = np.array([[0, 1, 2 + eps], [1, 0, 1], [2 + eps, 1, 0]], dtype=object)
    d = np.vectorize(Fraction, otypes=[object])(d)
    assert not validate_metric(d).ok
    assert validate_metric(d.astype(float)).ok


def test_positivity_and_symmetry_issues():
    d = np.array([[0, 0], [0, 0]], dtype=float)
    assert not validate_metric(d).ok
    assert validate_metric(d, pseudo=True).ok
    d = np.array([[0, 1], [2, 0]], dtype=float)
    kinds = [k for k, _ in validate_metric(d).issues]
    assert "symmetry" in kinds


def test_zero_mass_entry_flagged():
    X = simplex(2)
    Xm = MetricMeasureSpace(X, [1.0, 0.0])
    assert ("FULL_SUPPORT", 1) in Xm.check_mass()


def test_mass_sum_flagged():
    Xm = MetricMeasureSpace(simplex(2), [0.5, 0.4])
    assert ("MASS_SUM", None) in Xm.check_mass()


def test_space_is_immutable():
    X = simplex(3)
    with pytest.raises(ValueError):
        X.dist[0, 1] = 3.0


def test_quotient_collapses_zero_distance_classes():
    d = np.array([[0, 0, 2], [0, 0, 2], [2, 2, 0]], dtype=float)
    P = PseudoMetricSpace(("a", "b", "c"), d)
    Q, cls = quotient_pseudometric(P)
    assert len(Q) == 2
    assert cls[0] == cls[1] != cls[2]
    assert Q.labels[0] == ("a", "b")


def test_strip_quotient_identifies_ends():
    P = strip(0.25)
    Q, cls = quotient_pseudometric(P)
    ends = [cls[i] for i, (x, _) in enumerate(P.labels) if x == 0.0]
    assert len(set(ends)) == 1
    assert validate_metric(Q.dist).ok


def test_thicken_and_hausdorff_on_segment():
    X = segment(11)
    A = [0]
    assert thicken(X, A, 0.3) == frozenset({0, 1, 2, 3})
    assert hausdorff_distance(X, [0], [10]) == pytest.approx(1.0)
    value, peak = directed_hausdorff(X, [0, 1], [10])
    assert value == pytest.approx(1.0) and peak == 0


def test_thicken_rejects_negative_radius():
    with pytest.raises(ValueError):
        thicken(simplex(3), [0], -1)


def test_empty_subset_rejected():
    with pytest.raises(ValueError):
        as_subset(simplex(3), [])


def test_covering_numbers():
    X = segment(11)
    assert covering_number(X, 0.1, "exact") == 4  # each ball holds three consecutive points
    assert covering_number(X, 0.1, "greedy") >= covering_number(X, 0.1, "exact")
    assert covering_number(X, 1.0, "exact") == 1


def test_standard_carriers_are_nearly_geodesic():
    for X in (segment(21), cycle(16), grid(5, 4), circle(36), euclidean_grid(np.arange(5) * 0.5, np.arange(3) * 0.5)):
        assert validate_metric(X.dist).ok
        assert midpoint_defect(X) <= X.mesh + 1e-9


def test_simplex_is_not_geodesic():
    assert midpoint_defect(simplex(3)) == pytest.approx(0.5)


# ---------------------------------------------------------------- properties

@st.composite
def random_space(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return oracles.euclidean_space(np.random.default_rng(seed), n)


@st.composite
def space_and_subsets(draw, max_n=10):
    X = draw(random_space(max_n))
    n = len(X)
    sub = st.lists(st.integers(0, n - 1), min_size=1, max_size=n)
    return X, draw(sub), draw(sub), draw(sub)


@settings(max_examples=80)
@given(random_space())
def test_euclidean_samples_satisfy_metric_axioms(X):
    assert validate_metric(X.dist).ok


@settings(max_examples=80)
@given(space_and_subsets())
def test_hausdorff_is_a_metric_on_subsets(data):
    X, A, B, C = data
    dAB = hausdorff_distance(X, A, B)
    assert dAB == pytest.approx(oracles.hausdorff_direct(X.dist, A, B))
    assert dAB == hausdorff_distance(X, B, A)
    assert hausdorff_distance(X, A, A) == 0
    assert dAB <= hausdorff_distance(X, A, C) + hausdorff_distance(X, C, B) + 1e-12


@settings(max_examples=60)
@given(space_and_subsets(), st.floats(0, 1), st.floats(0, 1))
def test_thickening_algebra(data, r, s):
    X, A, B, _ = data
    Ar = thicken(X, A, r)
    assert as_subset(X, A) <= Ar
    assert thicken(X, Ar, s) <= thicken(X, A, r + s)
    assert (hausdorff_distance(X, A, B) <= r + 1e-9) == (as_subset(X, B) <= Ar and as_subset(X, A) <= thicken(X, B, r))


@settings(max_examples=40)
@given(st.integers(4, 40), st.integers(0, 1000))
def test_thickening_composes_on_geodesic_carrier(n, seed):
    """On a carrier with midpoint defect <= mesh, (A^r)^s covers A^(r+s) once a mesh of slack is added."""
    rng = np.random.default_rng(seed)
    X = cycle(n)
    A = rng.choice(n, size=rng.integers(1, n // 2 + 1), replace=False).tolist()
    r, s = rng.integers(0, n // 2, size=2).astype(float)
    assert thicken(X, A, r + s) <= thicken(X, thicken(X, A, r + X.mesh), s)


@settings(max_examples=40)
@given(st.integers(2, 30), st.integers(0, 1000))
def test_thickening_intersection_nonempty(n, seed):
    """A^(t rho) and B^((1 - t) rho) always meet when rho = d_H(A, B) on a segment."""
    rng = np.random.default_rng(seed)
    X = segment(n + 1, float(n))
    A = rng.choice(n + 1, size=rng.integers(1, 4), replace=False).tolist()
    B = rng.choice(n + 1, size=rng.integers(1, 4), replace=False).tolist()
    rho = hausdorff_distance(X, A, B)
    for t in np.linspace(0, 1, 5):
        assert thicken(X, A, t * rho + X.mesh) & thicken(X, B, (1 - t) * rho + X.mesh)


def test_distance_to_set_matches_rows():
    X = segment(5)
    assert np.allclose(distance_to_set(X, [0, 4]), [0, 0.25, 0.5, 0.25, 0])


def test_exact_round_trip_between_modes():
    X = oracles.rational_space(np.random.default_rng(0), 5)
    assert X.exact
    assert X.to_float().to_exact() == X
    assert X == FiniteMetricSpace(X.labels, X.dist)
