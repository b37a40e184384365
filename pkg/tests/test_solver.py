from fractions import Fraction

import numpy as np
import pytest

from bregman_ep import (
    Box, DomainError, IterateState, LegendreSpec, LinearMap, ParamSchedule, ProblemBundle,
    RunConfig, Simplex, StageError, Status, ZeroBifunction, lemma_arg_slack, projection_step,
    prox_step, run, step, validate_schedule,
)
from bregman_ep.presets import multi_omega_problem, paper_problem, preset_run_config
from bregman_ep.solver import burn_in_index


@pytest.fixture(scope="module")
def paper():
    return paper_problem()


@pytest.fixture(scope="module")
def paper_run(paper):
    cfg = preset_run_config("paper-example", anchor=1.0)
    return run(paper, ParamSchedule.paper_example(), cfg)


# schedules

def test_corrected_schedule_is_valid():
    report = validate_schedule(ParamSchedule.paper_example(), 10_000, 9.0, 9.0)
    assert report.ok, report.lines()


def test_literal_alpha_fails_at_first_index():
    report = validate_schedule(ParamSchedule.paper_literal(), 100, 9.0, 9.0)
    assert not report.ok
    alpha2 = [v for v in report.violations if v.rule.startswith("alpha_2")]
    assert alpha2[0].n == 1
    assert alpha2[0].value == pytest.approx(-5 / 12, abs=1e-15)
    # 1/3 - 3/(4n) is negative for n = 1, 2 only
    assert alpha2[0].count == 2
    sums = [v for v in report.violations if "sum" in v.rule]
    assert sums[0].count == 100


def test_literal_beta_fails_at_first_index():
    report = validate_schedule(ParamSchedule(beta_offset=0.0), 100, 9.0, 9.0)
    (v,) = report.violations
    assert v.rule.startswith("beta") and v.n == 1 and v.value == 1.5


def test_step_size_must_stay_below_bound():
    report = validate_schedule(ParamSchedule(lam=1 / 9), 10, 9.0, 9.0)
    assert any(v.rule.startswith("lambda") for v in report.violations)


def test_tail_floor_catches_vanishing_products():
    # beta -> 1 makes beta(1 - beta) vanish
    report = validate_schedule(ParamSchedule(beta_base=1.0 - 1e-6, beta_offset=1e9), 50, 9.0, 9.0)
    assert any("beta * (1 - beta)" in v.rule for v in report.violations)


def test_increasing_alpha1_is_flagged():
    report = validate_schedule(ParamSchedule(alpha1_power=-0.1, alpha1_scale=0.01), 20, 9.0, 9.0)
    assert any("increases" in v.rule for v in report.violations)


def test_schedule_accessors_accept_arrays():
    s = ParamSchedule.paper_example()
    ns = np.arange(1, 6)
    a = s.alpha(ns)
    np.testing.assert_allclose(sum(a), 1.0, atol=1e-15)
    np.testing.assert_allclose(s.beta(ns), 0.5 + 1 / (ns + 2))
    assert s.alpha(1) == (0.25, 0.25, 0.25, 0.25)


def test_horizon_must_be_positive():
    with pytest.raises(ValueError):
        validate_schedule(ParamSchedule(), 0, 9.0, 9.0)


# single step

def test_first_step_matches_golden(paper, golden):
    nxt = step(paper, ParamSchedule.paper_example(), IterateState.initial([5.0]), [1.0])
    for name, (dec, frac) in golden["first_step"].items():
        got = nxt.x if name == "x_next" else getattr(nxt, name)
        assert float(got[0]) == pytest.approx(float(Fraction(frac)), abs=1e-14), name
    assert nxt.n == 2
    assert float(nxt.y[0]) == 115 / 64


def test_first_step_with_beta_point_nine(paper):
    # hand composition: z clamps to 2, v = 2, w = 14/9, u = w
    sched = ParamSchedule(beta_offset=1.5)
    assert sched.beta(1) == pytest.approx(0.9)
    nxt = step(paper, sched, IterateState.initial([5.0]), [1.0])
    w = Fraction(14, 9)
    k = Fraction(9, 10) * w + Fraction(1, 10) * w / 3
    h = (1 + 5 + w + k) / 4
    assert float(nxt.k[0]) == pytest.approx(float(k), abs=1e-14)
    assert float(nxt.h[0]) == pytest.approx(float(h), abs=1e-14)
    assert float(nxt.x[0]) == 2.0


def test_origin_is_fixed(paper):
    nxt = step(paper, ParamSchedule(), IterateState.initial([0.0]), [0.0])
    for name in "yzvwukhx":
        assert float(getattr(nxt, name)[0]) == 0.0, name


@pytest.mark.parametrize("kind", ["box", "simplex"])
def test_fixed_point_preservation(kind):
    if kind == "box":
        spec, cset, q = LegendreSpec.squared_norm(2), Box([0, 0], [2, 2]), np.array([0.4, 1.3])
    else:
        spec, cset, q = LegendreSpec.negative_entropy(3), Simplex(3), np.array([0.2, 0.3, 0.5])
    problem = ProblemBundle(spec, cset, ZeroBifunction(), ZeroBifunction(),
                            LinearMap.identity(spec.dim), 1.0, 1.0)
    nxt = step(problem, ParamSchedule(), IterateState(7, q), q)
    for name in "yzvwukhx":
        np.testing.assert_allclose(getattr(nxt, name), q, atol=1e-12, err_msg=name)


def test_stage_error_names_stage():
    # S leaves the entropy domain, so the first average involving S z fails
    spec = LegendreSpec.negative_entropy(2)
    problem = ProblemBundle(spec, Simplex(2), ZeroBifunction(), ZeroBifunction(),
                            LinearMap(-np.eye(2)), 1.0, 1.0)
    state = IterateState.initial([0.5, 0.5])
    with pytest.raises(StageError) as exc:
        step(problem, ParamSchedule(), state, [0.5, 0.5])
    assert exc.value.stage == "w"
    assert isinstance(exc.value.cause, DomainError)

    result = run(problem, ParamSchedule(), RunConfig([0.5, 0.5], [0.5, 0.5]))
    assert result.status is Status.ERROR and result.trace == []
    assert result.error.stage == "w"


# lemma slack

def test_lemma_slack_hand_value(paper):
    y, z, lam = Fraction(23, 64), Fraction(1841, 4096), Fraction(1, 32)
    expected = (Fraction(1, 2) - (1 - 9 * lam) * (1 - y) ** 2 / 2
                - (1 - 9 * lam) * (z - y) ** 2 / 2 - z ** 2 / 2)
    got = lemma_arg_slack(paper, [0.0], [1.0], [float(y)], [float(z)], float(lam))
    assert got == pytest.approx(float(expected), abs=1e-14)
    assert got >= 0


def test_lemma_slack_vanishes_at_solution(paper):
    assert lemma_arg_slack(paper, [0.0], [0.0], [0.0], [0.0], 1 / 32) == 0.0


def test_lemma_slack_sweep(paper, rng):
    worst = np.inf
    for x in rng.uniform(0, 2, 100):
        y = prox_step(paper.spec, paper.g, paper.cset, [x], 1 / 32)
        z = prox_step(paper.spec, paper.g, paper.cset, [x], 1 / 32, at=y)
        worst = min(worst, lemma_arg_slack(paper, [0.0], [x], y, z, 1 / 32))
    assert worst >= -1e-8


# full runs

def test_paper_run_matches_golden(paper_run, golden):
    assert paper_run.status is Status.MAX_ITERS
    assert paper_run.iterations == 20_000
    for n, val in golden["iterates"].items():
        assert float(paper_run.trace[int(n) - 1].x[0]) == pytest.approx(float(val), abs=1e-12), n
    assert abs(paper_run.solution[0]) <= 0.05


def test_paper_run_diagnostics(paper_run):
    rows = paper_run.trace
    assert min(r.lemma_arg_slack for r in rows) >= -1e-8
    assert max(r.projection_cert_slack for r in rows) <= 1e-8
    assert all(r.residual >= 0 for r in rows)
    assert [r.n for r in rows[:3]] == [1, 2, 3]


def test_stage_membership(paper):
    cfg = preset_run_config("paper-example", anchor=1.0, max_iters=300)
    res = run(paper, ParamSchedule(), cfg, keep_states=True)
    for s in res.states[1:]:
        for name in "yzux":
            assert paper.cset.contains(getattr(s, name), 1e-9), (s.n, name)


def test_monotone_tail(paper_run):
    d = [r.df_target for r in paper_run.trace]
    b = burn_in_index(d)
    assert b < len(d) // 2
    assert np.all(np.diff(d[b:]) <= 0)


def test_burn_in_index():
    assert burn_in_index([3, 2, 1]) == 0
    assert burn_in_index([1, 2, 1, 0]) == 1
    assert burn_in_index([1, 0, 2, 1]) == 2


def test_origin_run_converges_immediately(paper):
    res = run(paper, ParamSchedule(), RunConfig([0.0], [0.0], track_target=[0.0]))
    assert res.status is Status.CONVERGED
    assert res.iterations == 1
    assert res.solution[0] == 0.0


def test_projection_wiring_agrees(paper):
    sched = ParamSchedule()
    a = run(paper, sched, RunConfig([5.0], [1.0], max_iters=1000))
    b = run(paper, sched, RunConfig([5.0], [1.0], max_iters=1000, wiring="projection"))
    xa = np.array([r.x[0] for r in a.trace])
    xb = np.array([r.x[0] for r in b.trace])
    assert np.max(np.abs(xa - xb)) <= 1e-12


def test_multi_omega_limit_is_anchor():
    cfg = preset_run_config("multi-omega")
    res = run(multi_omega_problem(), ParamSchedule.multi_omega(), cfg)
    assert res.status is Status.CONVERGED
    assert abs(res.solution[0] - 0.7) <= 1e-6


def test_max_iters_cap(paper):
    res = run(paper, ParamSchedule(), RunConfig([5.0], [1.0], max_iters=10))
    assert res.status is Status.MAX_ITERS and res.iterations == 10


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig([1.0], [1.0], residual_tol=0.0)
    with pytest.raises(ValueError):
        RunConfig([1.0], [1.0], max_iters=0)
    with pytest.raises(ValueError):
        RunConfig([1.0], [1.0], wiring="other")


def test_projection_step_matches_step(paper):
    state = IterateState.initial([1.7])
    a = step(paper, ParamSchedule(), state, [1.0])
    b = projection_step(paper, ParamSchedule(), state, [1.0])
    for name in "yzvwukhx":
        assert np.array_equal(getattr(a, name), getattr(b, name)), name
