"""Brute-force minimisers used to certify the closed forms.

The grid and golden-section routines are never called from the solver's
hot path; ``projected_gradient`` doubles as the generic fallback for
projections and prox steps without a closed form.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, EmptyGridError

GRID_MAX_DIM = 3
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class GridSpec:
    lower: tuple
    upper: tuple
    points: int

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lower))
        hi = tuple(float(v) for v in np.atleast_1d(self.upper))
        if len(lo) != len(hi):
            raise ValueError("grid bounds differ in dimension")
        if not all(np.isfinite(lo + hi)) or any(a >= b for a, b in zip(lo, hi)):
            raise ValueError(f"invalid grid bounds {lo} .. {hi}")
        if self.points < 3:
            raise ValueError("grid needs at least 3 points per dimension")
        if len(lo) > GRID_MAX_DIM:
            raise ValueError(f"grid search limited to dim <= {GRID_MAX_DIM}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def covering(cls, cset, points):
        lo, hi = cset.bounding_box()
        return cls(tuple(lo), tuple(hi), points)

    @property
    def pitch(self):
        return max((b - a) / (self.points - 1) for a, b in zip(self.lower, self.upper))

    def nodes(self):
        """All grid points in lexicographic order, shape (points**dim, dim)."""
        axes = [np.linspace(a, b, self.points) for a, b in zip(self.lower, self.upper)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


def _scan(objective, cset, nodes, tol, batch=False):
    feasible = nodes[cset.contains_many(nodes, tol)]
    if batch:
        vals = np.asarray(objective(feasible), float)
        vals = np.where(np.isnan(vals), np.inf, vals)
        if vals.size == 0 or not np.isfinite(vals).any():
            return None
        return feasible[int(np.argmin(vals))]  # argmin keeps the first minimiser
    best, best_val = None, np.inf
    for p in feasible:
        try:
            val = objective(p)
        except DomainError:
            continue
        # strict comparison keeps the first (lexicographically smallest) minimiser
        if val < best_val or best is None:
            best, best_val = p, val
    return best


def grid_argmin(objective, cset, grid, tol=1e-12, refine=0, window=4, batch=False):
    """Feasible grid point of minimal objective; ties go to the
    lexicographically smallest point.

    With ``refine > 0`` the search is repeated that many times on a grid of
    the same size spanning ``window`` pitches around the previous winner,
    clipped to the original bounds. With ``batch=True`` the objective takes
    an (m, dim) array of points and returns m values.
    """
    best = _scan(objective, cset, grid.nodes(), tol, batch)
    if best is None:
        raise EmptyGridError("no feasible grid point")
    lo0, hi0 = np.array(grid.lower), np.array(grid.upper)
    for _ in range(refine):
        half = window * grid.pitch
        lo, hi = np.maximum(best - half, lo0), np.minimum(best + half, hi0)
        grid = GridSpec(tuple(lo), tuple(hi), grid.points)
        cand = _scan(objective, cset, grid.nodes(), tol, batch)
        if cand is not None:
            best = cand
    return best.copy()


def golden_section(objective, lo, hi, tol):
    if not lo < hi:
        raise ValueError("need lo < hi")
    a, b = float(lo), float(hi)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = objective(c), objective(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = objective(d)
    return 0.5 * (a + b)


def projected_gradient(gradient, project, start, step, tol, max_iters, objective=None):
    """Projected gradient iteration y <- P(y - t grad(y)).

    Stops once the projected step taken at the initial step size moves by
    less than ``tol`` in the sup norm. With ``objective`` given, trial steps
    are halved until the sufficient decrease condition holds (points where
    the objective is infinite are rejected the same way) and may grow back
    after each accepted step; without it the step is fixed.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    y = np.asarray(project(np.asarray(start, float)), float)
    t0 = t = float(step)
    fy = objective(y) if objective is not None else None
    noisy = False
    for _ in range(max_iters):
        g = gradient(y)
        probe = np.asarray(project(y - t0 * g), float)
        if np.max(np.abs(probe - y)) < tol:
            return probe if objective is None or np.isfinite(objective(probe)) else y
        if objective is None:
            y = probe
            continue
        while True:
            cand = probe if t == t0 else np.asarray(project(y - t * g), float)
            diff = cand - y
            fc = objective(cand)
            bound = fy + g @ diff + (diff @ diff) / (2.0 * t)
            slack = 1e-14 * max(1.0, abs(fy))  # roundoff in the objective values
            if np.isfinite(fc) and fc <= bound + slack:
                break
            t *= 0.5
            if t < 1e-300:
                raise ConvergenceError("step size underflow in projected gradient")
        # gradient mapping at t, rescaled to the initial step
        if np.max(np.abs(diff)) * (t0 / t) < tol:
            return cand
        y, fy = cand, fc
        # once decrease is only visible through roundoff, regrowing the step oscillates
        noisy = noisy or fc > bound
        if not noisy:
            t = min(2.0 * t, t0)
    raise ConvergenceError(f"projected gradient did not converge in {max_iters} iterations")
