"""Closed convex feasible sets and Bregman projections onto them."""
from dataclasses import dataclass

import numpy as np

from .errors import DEFAULT_TOL, DimensionError, DomainError, InfeasibleError
from .legendre import Kind, _grad, _primal, as_vector, bregman_distance, grad_f
from .oracle import projected_gradient


class ConvexSet:
    """Base class; subclasses define membership, Euclidean projection and
    the minimum of a linear function over the set."""

    dim: int

    def contains(self, x, tol=1e-9):
        raise NotImplementedError

    def contains_many(self, points, tol=1e-9):
        """Row-wise membership mask for an (m, dim) array."""
        return np.array([self.contains(p, tol) for p in points], dtype=bool)

    def euclidean_project(self, x):
        raise NotImplementedError

    def min_linear(self, d):
        """min over y in C of <d, y>; may be -inf for unbounded sets."""
        raise NotImplementedError

    def bounding_box(self):
        raise NotImplementedError

    def sample(self, rng, count):
        """Points of C, boundary points included, as a (count, dim) array."""
        raise NotImplementedError

    def _check(self, x):
        return as_vector(x, self.dim)


@dataclass(frozen=True, eq=False)
class Box(ConvexSet):
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo, hi = as_vector(self.lower), as_vector(self.upper)
        if lo.size != hi.size:
            raise DimensionError("box bounds differ in dimension")
        if np.any(lo > hi):
            raise ValueError(f"box lower {lo} exceeds upper {hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def interval(cls, lo, hi):
        return cls(np.array([lo], float), np.array([hi], float))

    @property
    def dim(self):
        return self.lower.size

    def contains(self, x, tol=1e-9):
        x = self._check(x)
        if x.size <= 8:
            return all(lo - tol <= v <= hi + tol
                       for lo, v, hi in zip(self.lower.tolist(), x.tolist(), self.upper.tolist()))
        return bool((x >= self.lower - tol).all() and (x <= self.upper + tol).all())

    def contains_many(self, points, tol=1e-9):
        return np.all((points >= self.lower - tol) & (points <= self.upper + tol), axis=1)

    def euclidean_project(self, x):
        return np.minimum(np.maximum(self._check(x), self.lower), self.upper)

    def min_linear(self, d):
        return float(np.minimum(d * self.lower, d * self.upper).sum())

    def bounding_box(self):
        return self.lower.copy(), self.upper.copy()

    def sample(self, rng, count):
        pts = rng.uniform(self.lower, self.upper, size=(count, self.dim))
        # push a quarter of the samples onto faces
        faces = rng.integers(0, 2, size=pts.shape).astype(bool)
        on_face = rng.random(pts.shape) < 0.25
        pts = np.where(on_face & faces, self.upper, pts)
        pts = np.where(on_face & ~faces, self.lower, pts)
        return pts


@dataclass(frozen=True, eq=False)
class Ball(ConvexSet):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center))
        if not self.radius > 0:
            raise ValueError(f"ball radius must be positive, got {self.radius}")

    @property
    def dim(self):
        return self.center.size

    def contains(self, x, tol=1e-9):
        return bool(np.linalg.norm(self._check(x) - self.center) <= self.radius + tol)

    def contains_many(self, points, tol=1e-9):
        return np.linalg.norm(points - self.center, axis=1) <= self.radius + tol

    def euclidean_project(self, x):
        x = self._check(x)
        d = x - self.center
        r = np.linalg.norm(d)
        if r <= self.radius:
            return x.copy()
        return self.center + d * (self.radius / r)

    def min_linear(self, d):
        return float(d @ self.center - self.radius * np.linalg.norm(d))

    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    def sample(self, rng, count):
        dirs = rng.normal(size=(count, self.dim))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        radii = self.radius * rng.random(count) ** (1.0 / self.dim)
        radii[: count // 4] = self.radius
        return self.center + dirs * radii[:, None]


@dataclass(frozen=True, eq=False)
class Halfspace(ConvexSet):
    """{y : <normal, y> <= offset}."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        a = as_vector(self.normal)
        if not np.linalg.norm(a) > 0:
            raise ValueError("halfspace normal must be nonzero")
        object.__setattr__(self, "normal", a)

    @property
    def dim(self):
        return self.normal.size

    def contains(self, x, tol=1e-9):
        return bool(self.normal @ self._check(x) <= self.offset + tol)

    def contains_many(self, points, tol=1e-9):
        return points @ self.normal <= self.offset + tol

    def euclidean_project(self, x):
        x = self._check(x)
        excess = self.normal @ x - self.offset
        if excess <= 0:
            return x.copy()
        return x - excess / (self.normal @ self.normal) * self.normal

    def min_linear(self, d):
        a = self.normal
        # bounded below only when d = -t a with t >= 0
        t = -(d @ a) / (a @ a)
        if t >= 0 and np.allclose(d, -t * a, atol=1e-14, rtol=1e-12):
            return float(-t * self.offset)
        return -np.inf

    def bounding_box(self):
        raise ValueError("halfspace is unbounded")

    def sample(self, rng, count, spread=3.0):
        a = self.normal / np.linalg.norm(self.normal)
        base = self.offset / np.linalg.norm(self.normal) * a
        pts = base + rng.uniform(-spread, spread, size=(count, self.dim))
        excess = pts @ a - a @ base
        depth = rng.random(count) * spread
        depth[: count // 4] = 0.0
        return pts - (excess + depth)[:, None] * a


@dataclass(frozen=True, eq=False)
class Simplex(ConvexSet):
    """Standard simplex {y >= 0, sum y = 1}."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError("simplex dimension must be >= 1")

    @property
    def dim(self):
        return self.n

    def contains(self, x, tol=1e-9):
        x = self._check(x)
        return bool(np.all(x >= -tol) and abs(x.sum() - 1.0) <= tol)

    def contains_many(self, points, tol=1e-9):
        return np.all(points >= -tol, axis=1) & (np.abs(points.sum(axis=1) - 1.0) <= tol)

    def euclidean_project(self, x):
        x = self._check(x)
        s = np.sort(x)[::-1]
        css = np.cumsum(s) - 1.0
        idx = np.arange(1, x.size + 1)
        rho = np.nonzero(s - css / idx > 0)[0][-1]
        return np.maximum(x - css[rho] / (rho + 1), 0.0)

    def min_linear(self, d):
        return float(np.min(d))

    def bounding_box(self):
        return np.zeros(self.n), np.ones(self.n)

    def sample(self, rng, count):
        pts = rng.dirichlet(np.ones(self.n), size=count)
        # strictly positive samples for entropy-compatible use; vertices for the rest
        verts = np.eye(self.n)[rng.integers(0, self.n, size=count // 8)]
        pts[: verts.shape[0]] = verts
        return pts


def _closed_form(spec, cset, x):
    sq = spec.kind is Kind.SQUARED_NORM
    if sq and isinstance(cset, (Box, Ball, Halfspace)):
        return cset.euclidean_project(x)
    if spec.kind is Kind.NEGATIVE_ENTROPY and isinstance(cset, Simplex):
        return x / x.sum()
    return None


def bregman_project(spec, cset, x, *, tol=DEFAULT_TOL):
    """argmin over y in C of D_f(y, x)."""
    x = as_vector(x, spec.dim)
    if cset.dim != spec.dim:
        raise DimensionError(f"set dim {cset.dim} != space dim {spec.dim}")
    if spec.kind is Kind.SQUARED_NORM and type(cset) is Box:
        return np.minimum(np.maximum(x, cset.lower), cset.upper)
    if not spec.in_domain(x):
        raise DomainError(f"{x} is outside int dom f")
    out = _closed_form(spec, cset, x)
    if out is not None:
        return out
    if cset.contains(x, tol=0.0):
        return x.copy()
    start = cset.euclidean_project(x)
    if not spec.in_domain(start):
        raise InfeasibleError(f"no starting point of C inside int dom f near {x}")
    gx = grad_f(spec, x)

    def objective(y):
        if not spec.in_domain(y):
            return np.inf
        return bregman_distance(spec, y, x)

    return projected_gradient(
        lambda y: grad_f(spec, y) - gx,
        cset.euclidean_project,
        start,
        step=1.0,
        tol=1e-12,
        max_iters=100_000,
        objective=objective,
    )


def variational_slack(spec, cset, x, z):
    """max over y in C of <z - y, grad f(z) - grad f(x)>.

    Exact (via the set's support function); nonpositive iff z is the
    Bregman projection of x onto C.
    """
    z, x = _primal(spec, z), _primal(spec, x)
    d = _grad(spec, z) - _grad(spec, x)
    return float(z @ d) - cset.min_linear(d)


def sampled_variational_slack(spec, cset, x, z, ys):
    d = grad_f(spec, z) - grad_f(spec, x)
    return float(np.max((z - np.asarray(ys)) @ d))


def projection_descent_check(spec, cset, x, y, *, tol=DEFAULT_TOL):
    """D_f(y, x) - D_f(y, z) - D_f(z, x) with z the projection of x; >= 0 for y in C."""
    z = bregman_project(spec, cset, x, tol=tol)
    return (bregman_distance(spec, y, x, tol=tol) - bregman_distance(spec, y, z, tol=tol)
            - bregman_distance(spec, z, x, tol=tol))


def contains(cset, x, tol=1e-9):
    return cset.contains(x, tol)
