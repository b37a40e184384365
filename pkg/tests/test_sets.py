import numpy as np
import pytest

from bregman_ep import (
    Ball, Box, DimensionError, DomainError, Halfspace, LegendreSpec, Simplex, bregman_distance,
    bregman_project, contains, projection_descent_check,
)
from bregman_ep.oracle import GridSpec, grid_argmin
from bregman_ep.properties import set_cases
from bregman_ep.sets import sampled_variational_slack, variational_slack

SQ1 = LegendreSpec.squared_norm(1)
SQ2, ENT2 = LegendreSpec.squared_norm(2), LegendreSpec.negative_entropy(2)
C = Box.interval(0.0, 2.0)


def test_contains_examples():
    assert contains(C, [1.0], 0.0)
    assert not contains(C, [5.0], 0.0)
    assert contains(Simplex(2), [0.25, 0.75], 1e-9)
    assert not contains(Simplex(2), [0.25, 0.8], 1e-9)
    assert contains(Ball([0, 0], 1.0), [0.6, 0.8], 1e-12)
    assert contains(Halfspace([1, 1], 1.0), [2.0, -1.0], 0.0)


def test_contains_dimension_mismatch():
    with pytest.raises(DimensionError):
        contains(C, [1.0, 2.0])


@pytest.mark.parametrize("build", [
    lambda: Box([0, 1], [1, 0]),
    lambda: Ball([0.0], 0.0),
    lambda: Halfspace([0.0, 0.0], 1.0),
    lambda: Simplex(0),
])
def test_invalid_sets(build):
    with pytest.raises((ValueError, DimensionError)):
        build()


def test_projection_examples():
    np.testing.assert_array_equal(bregman_project(SQ1, C, [5.0]), [2.0])
    np.testing.assert_allclose(bregman_project(ENT2, Simplex(2), [2.0, 6.0]), [0.25, 0.75])
    np.testing.assert_array_equal(bregman_project(SQ1, C, [1.3]), [1.3])


def test_entropy_simplex_projection_against_grid():
    x = np.array([2.0, 6.0])
    grid = GridSpec((1e-3, 1e-3), (1 - 1e-3, 1 - 1e-3), 999)
    best = grid_argmin(lambda y: bregman_distance(ENT2, y, x), Simplex(2), grid, tol=1e-9)
    assert np.max(np.abs(best - [0.25, 0.75])) <= 2 * grid.pitch


def test_ball_and_halfspace_closed_forms():
    np.testing.assert_allclose(bregman_project(SQ2, Ball([0, 0], 1.0), [3.0, 4.0]), [0.6, 0.8])
    np.testing.assert_allclose(bregman_project(SQ2, Halfspace([1, 1], 1.0), [2.0, 2.0]), [0.5, 0.5])


def test_projection_rejects_outside_domain():
    with pytest.raises(DomainError):
        bregman_project(ENT2, Simplex(2), [0.0, 1.0])


def test_projection_descent_examples():
    assert projection_descent_check(SQ1, C, [5.0], [1.0]) == pytest.approx(3.0, abs=1e-15)
    assert projection_descent_check(SQ1, C, [1.5], [0.2]) == 0.0


@pytest.mark.parametrize("case", range(7))
def test_projection_properties(case, rng):
    spec, cset = set_cases()[case]
    ys = cset.sample(rng, 64)
    if spec.kind.value == "negative-entropy":
        ys = ys[np.all(ys > 0, axis=1)]
    for _ in range(100):
        x = rng.uniform(0.05, 4.0, 2) if spec.kind.value == "negative-entropy" else rng.uniform(-4, 4, 2)
        z = bregman_project(spec, cset, x)
        assert cset.contains(z, 1e-9)
        # idempotence
        assert np.max(np.abs(bregman_project(spec, cset, z) - z)) <= 1e-10
        # variational characterisation, sampled and exact
        assert sampled_variational_slack(spec, cset, x, z, ys) <= 1e-8
        assert variational_slack(spec, cset, x, z) <= 1e-8
        for y in ys[:4]:
            assert projection_descent_check(spec, cset, x, y) >= -1e-9


def _grid(cset, pts):
    if isinstance(cset, Halfspace):
        return GridSpec((-4, -4), (4, 4), pts)
    return GridSpec.covering(cset, pts)


CLOSED_FORM_CASES = [c for c in set_cases()
                     if c[0].kind.value == "squared-norm" and not isinstance(c[1], Simplex)
                     or c[0].kind.value == "negative-entropy" and isinstance(c[1], Simplex)]


@pytest.mark.parametrize("spec, cset", CLOSED_FORM_CASES)
def test_closed_forms_agree_with_grid_oracle(spec, cset, rng):
    entropy = spec.kind.value == "negative-entropy"
    for _ in range(4):
        x = rng.uniform(0.1, 3.0, 2) if entropy else rng.uniform(-3, 3, 2)
        grid = _grid(cset, 101)

        def objective(y):
            if not spec.in_domain(y):
                return np.inf
            return bregman_distance(spec, y, x)

        # curved and slanted boundaries need zoom levels: a single grid can miss
        # the minimiser along the boundary by more than a pitch
        best = grid_argmin(objective, cset, grid, tol=1e-9 if entropy else 1e-12, refine=3)
        assert np.max(np.abs(bregman_project(spec, cset, x) - best)) <= 2 * grid.pitch


def test_one_dimensional_oracle_agreement():
    grid = GridSpec((0.0,), (2.0,), 2001)
    for x in (-1.0, 0.3, 1.7, 5.0):
        best = grid_argmin(lambda y: bregman_distance(SQ1, y, [x]), C, grid)
        assert abs(bregman_project(SQ1, C, [x])[0] - best[0]) <= 2 * grid.pitch


def test_generic_fallback_matches_simplex_projection():
    # squared norm onto the simplex goes through projected gradient
    x = np.array([0.9, 0.4])
    np.testing.assert_allclose(bregman_project(SQ2, Simplex(2), x), [0.75, 0.25], atol=1e-10)
