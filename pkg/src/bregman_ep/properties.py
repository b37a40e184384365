"""Seeded randomized sweeps of the kernel invariants (``check-properties``)."""
import math
from dataclasses import dataclass

import numpy as np

from .legendre import (
    LegendreSpec, bregman_distance, conjugate_eval, dual_average, f_eval, grad_conjugate,
    grad_f, v_f,
)
from .presets import paper_problem
from .problem import QuadraticBifunction, prox_certificate, prox_step, resolvent_descent_check
from .sets import Ball, Box, Halfspace, Simplex, bregman_project, projection_descent_check, \
    sampled_variational_slack
from .solver import lemma_arg_slack


@dataclass
class PropertyResult:
    name: str
    worst: float
    bound: float
    upper: bool  # True: worst <= bound is required; False: worst >= bound
    cases: int

    @property
    def passed(self):
        return self.worst <= self.bound if self.upper else self.worst >= self.bound

    def line(self):
        rel = "<=" if self.upper else ">="
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark}  {self.name}: worst {self.worst:.3e} {rel} {self.bound:g}  ({self.cases} cases)"


SPECS = (LegendreSpec.squared_norm(3), LegendreSpec.negative_entropy(3))


def _point(spec, rng, floor=0.05):
    if spec.kind.value == "negative-entropy":
        return rng.uniform(floor, 4.0, spec.dim)
    return rng.uniform(-4.0, 4.0, spec.dim)


def set_cases(dim=2):
    """(spec, set) pairs covering every projection route."""
    sq, ent = LegendreSpec.squared_norm(dim), LegendreSpec.negative_entropy(dim)
    return [
        (sq, Box(np.full(dim, -1.0), np.full(dim, 2.0))),
        (sq, Ball(np.full(dim, 0.5), 1.5)),
        (sq, Halfspace(np.arange(1.0, dim + 1), 1.0)),
        (sq, Simplex(dim)),
        (ent, Simplex(dim)),
        (ent, Box(np.full(dim, 0.5), np.full(dim, 2.0))),
        (ent, Ball(np.full(dim, 2.0), 1.0)),
    ]


def inverse_pair(rng, cases):
    worst = 0.0
    for spec in SPECS:
        for _ in range(cases):
            x = _point(spec, rng)
            worst = max(worst, np.max(np.abs(grad_conjugate(spec, grad_f(spec, x)) - x)))
            s = rng.uniform(-3.0, 3.0, spec.dim)
            worst = max(worst, np.max(np.abs(grad_f(spec, grad_conjugate(spec, s)) - s)))
    return PropertyResult("grad f* o grad f = id", worst, 1e-10, True, 2 * cases * len(SPECS))


def gradient_consistency(rng, cases):
    worst = 0.0
    for spec in SPECS:
        for _ in range(cases):
            # central-difference truncation error grows like 1/x^2 for entropy
            x = _point(spec, rng, floor=0.5)
            h = 1e-4 * (1 + np.max(np.abs(x)))
            if spec.kind.value == "negative-entropy":
                h = min(h, 0.5 * x.min())
            fd = np.array([(f_eval(spec, x + h * e) - f_eval(spec, x - h * e)) / (2 * h)
                           for e in np.eye(spec.dim)])
            worst = max(worst, np.max(np.abs(fd - grad_f(spec, x))))
    return PropertyResult("central differences match grad f", worst, 1e-5, True, cases * len(SPECS))


def young_fenchel(rng, cases):
    worst = 0.0
    for spec in SPECS:
        for _ in range(cases):
            x = _point(spec, rng)
            g = grad_f(spec, x)
            worst = max(worst, abs(f_eval(spec, x) + conjugate_eval(spec, g) - g @ x))
    return PropertyResult("f(x) + f*(grad f(x)) = <grad f(x), x>", worst, 1e-9, True, cases * len(SPECS))


def distance_nonnegative(rng, cases):
    """D_f vanishes exactly on the diagonal: worst is min D_f(y, x) over y != x."""
    worst = np.inf
    for spec in SPECS:
        for _ in range(cases):
            x, y = _point(spec, rng), _point(spec, rng)
            if np.array_equal(x, y):
                continue
            worst = min(worst, bregman_distance(spec, y, x))
            if bregman_distance(spec, x, x) != 0.0:
                worst = -np.inf
    return PropertyResult("D_f(y, x) > 0 for y != x, D_f(x, x) = 0", worst, np.finfo(float).tiny,
                          False, cases * len(SPECS))


def v_f_identity(rng, cases):
    worst = 0.0
    for spec in SPECS:
        for _ in range(cases):
            x, s = _point(spec, rng), rng.uniform(-2.0, 2.0, spec.dim)
            worst = max(worst, abs(v_f(spec, x, s) - bregman_distance(spec, x, grad_conjugate(spec, s))))
    return PropertyResult("V_f(x, x*) = D_f(x, grad f*(x*))", worst, 1e-9, True, cases * len(SPECS))


def three_point(rng, cases):
    worst = np.inf
    for spec in SPECS:
        for _ in range(cases):
            x, y, z = (_point(spec, rng) for _ in range(3))
            lhs = bregman_distance(spec, x, y) + (z - x) @ (grad_f(spec, x) - grad_f(spec, y))
            worst = min(worst, bregman_distance(spec, z, y) - lhs)
    return PropertyResult("three-point inequality slack", worst, -1e-9, False, cases * len(SPECS))


def jensen_average(rng, cases):
    worst = np.inf
    for spec in SPECS:
        for _ in range(cases):
            m = int(rng.integers(2, 5))
            t = rng.dirichlet(np.ones(m))
            t = np.maximum(t, 1e-6)
            t /= t.sum()
            pts = [_point(spec, rng) for _ in range(m)]
            z = _point(spec, rng)
            avg = dual_average(spec, t, pts)
            rhs = sum(ti * bregman_distance(spec, z, p) for ti, p in zip(t, pts))
            worst = min(worst, rhs - bregman_distance(spec, z, avg))
    return PropertyResult("D_f(z, dual average) <= weighted D_f", worst, -1e-9, False, cases * len(SPECS))


def projection_certificates(rng, cases):
    """Worst variational-inequality slack, worst descent slack, worst idempotence gap."""
    cert, descent, idem, n = -np.inf, np.inf, 0.0, 0
    for spec, cset in set_cases():
        ys = cset.sample(rng, 64)
        if spec.kind.value == "negative-entropy":
            ys = ys[np.all(ys > 0, axis=1)]
        for _ in range(math.ceil(cases / 7)):
            x = _point(spec, rng)
            z = bregman_project(spec, cset, x)
            cert = max(cert, sampled_variational_slack(spec, cset, x, z, ys))
            idem = max(idem, np.max(np.abs(bregman_project(spec, cset, z) - z)))
            for y in ys[:8]:
                descent = min(descent, projection_descent_check(spec, cset, x, y))
            n += 1
    return [
        PropertyResult("projection variational certificate", cert, 1e-8, True, n),
        PropertyResult("projection descent slack", descent, -1e-9, False, n),
        PropertyResult("projection idempotence", idem, 1e-10, True, n),
    ]


def _batch_distance(spec, x):
    """D_f(., x) over the rows of an array, written out independently of the kernel."""
    if spec.kind.value == "negative-entropy":
        def objective(ys):
            with np.errstate(divide="ignore", invalid="ignore"):
                vals = np.sum(ys * np.log(ys / x) - ys + x, axis=1)
            return np.where(np.all(ys > 0, axis=1), vals, np.inf)
    else:
        def objective(ys):
            return 0.5 * np.sum((ys - x) ** 2, axis=1)
    return objective


ORACLE_WINDOW = 6.0
ORACLE_POINTS = 121


def projection_oracle(rng, cases):
    """Closed-form or fallback projection against a refined grid search.

    The tolerance is twice the pitch of the initial grid, which spans the
    set's bounding box clipped to [-6, 6] per coordinate.
    """
    from .oracle import GridSpec, grid_argmin

    worst, n = -np.inf, 0
    pairs = set_cases()
    for i in range(cases):
        spec, cset = pairs[i % len(pairs)]
        try:
            lo, hi = cset.bounding_box()
        except ValueError:  # unbounded halfspace
            lo, hi = np.full(cset.dim, -np.inf), np.full(cset.dim, np.inf)
        lo, hi = np.maximum(lo, -ORACLE_WINDOW), np.minimum(hi, ORACLE_WINDOW)
        grid = GridSpec(tuple(lo), tuple(hi), ORACLE_POINTS)
        x = _point(spec, rng)
        z = bregman_project(spec, cset, x)
        best = grid_argmin(_batch_distance(spec, x), cset, grid, tol=1e-9, refine=3, batch=True)
        worst = max(worst, np.max(np.abs(best - z)) / grid.pitch)
        n += 1
    return PropertyResult("projection vs grid oracle, error in grid pitches", worst, 2.0, True, n)


def prox_and_lemma(rng, cases):
    prob = paper_problem()
    spec, cset, g = prob.spec, prob.cset, prob.g
    lam = 1 / 32
    cert, slack = -np.inf, np.inf
    xstar = np.zeros(1)
    for _ in range(cases):
        x = rng.uniform(0.0, 2.0, 1)
        y = prox_step(spec, g, cset, x, lam)
        z = prox_step(spec, g, cset, x, lam, at=y)
        cert = max(cert, prox_certificate(spec, g, cset, x, lam, y),
                   prox_certificate(spec, g, cset, x, lam, z, at=y))
        slack = min(slack, lemma_arg_slack(prob, xstar, x, y, z, lam))
    return [
        PropertyResult("prox first-order certificate", cert, 1e-8, True, cases),
        PropertyResult("two-step descent slack at x* = 0", slack, -1e-8, False, cases),
    ]


def resolvent_descent(rng, cases):
    spec = LegendreSpec.squared_norm(1)
    cset = Box.interval(0.0, 2.0)
    phi = QuadraticBifunction.scalar(1.0, 1.0, -2.0)
    worst = np.inf
    for _ in range(cases):
        x = rng.uniform(-1.0, 5.0, 1)
        # fixed points of this resolvent solve phi's equilibrium problem: only 0
        worst = min(worst, resolvent_descent_check(spec, phi, cset, np.zeros(1), x))
    return PropertyResult("resolvent descent slack", worst, -1e-9, False, cases)


SWEEPS = (inverse_pair, gradient_consistency, young_fenchel, distance_nonnegative,
          v_f_identity, three_point, jensen_average, projection_certificates, projection_oracle,
          prox_and_lemma, resolvent_descent)


def run_all(seed=0, cases=100):
    rng = np.random.default_rng(seed)
    results = []
    for sweep in SWEEPS:
        out = sweep(rng, cases)
        results.extend(out if isinstance(out, list) else [out])
    return results
