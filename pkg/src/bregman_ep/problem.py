"""Bifunctions, the fixed-point map S, assumption checks, prox steps and
the resolvent of the second bifunction."""
from dataclasses import dataclass, field

import numpy as np

from .errors import DEFAULT_TOL, ConvergenceError, DegenerateSample, DimensionError, DomainError
from .legendre import Kind, LegendreSpec, as_vector, bregman_distance, grad_f
from .oracle import projected_gradient
from .sets import Box, ConvexSet, bregman_project


def _matrix(m, dim=None):
    a = np.atleast_2d(np.asarray(m, dtype=float))
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise DimensionError(f"expected {dim}x{dim}, got {a.shape}")
    return a


@dataclass(frozen=True, eq=False)
class QuadraticBifunction:
    """g(x, y) = y'Qy + x'Ry + x'Px."""

    Q: np.ndarray
    R: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        q = _matrix(self.Q)
        n = q.shape[0]
        if not np.allclose(q, q.T):
            raise ValueError("Q must be symmetric")
        object.__setattr__(self, "Q", q)
        object.__setattr__(self, "R", _matrix(self.R, n))
        object.__setattr__(self, "P", _matrix(self.P, n))

    @classmethod
    def scalar(cls, q, r, p):
        return cls([[q]], [[r]], [[p]])

    @property
    def dim(self):
        return self.Q.shape[0]

    def __call__(self, x, y):
        return float(y @ self.Q @ y + x @ self.R @ y + x @ self.P @ x)

    @property
    def scalar_coefficients(self):
        """(Q, R) as floats for the one-dimensional case."""
        return float(self.Q[0, 0]), float(self.R[0, 0])

    def grad_y(self, x, y):
        """Gradient of y -> g(x, y)."""
        return 2.0 * self.Q @ y + self.R.T @ x

    def diagonal_check(self, tol=1e-12):
        """max |g(x, x)| over the basis vectors and their pairwise sums."""
        n = self.dim
        e = np.eye(n)
        probes = [e[i] for i in range(n)] + [e[i] + e[j] for i in range(n) for j in range(i + 1, n)]
        return max(abs(self(p, p)) for p in probes)

    def is_convex_in_y(self, tol=1e-12):
        return bool(np.min(np.linalg.eigvalsh(self.Q)) >= -tol)


@dataclass(frozen=True)
class ZeroBifunction:
    def __call__(self, x, y):
        return 0.0

    def grad_y(self, x, y):
        return np.zeros_like(np.asarray(y, float))


@dataclass(frozen=True, eq=False)
class LinearMap:
    A: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A", _matrix(self.A))

    @classmethod
    def scaling(cls, s, dim=1):
        return cls(s * np.eye(dim))

    @classmethod
    def identity(cls, dim=1):
        return cls(np.eye(dim))

    def __call__(self, x):
        return self.A @ x


@dataclass(frozen=True, eq=False)
class ProblemBundle:
    spec: LegendreSpec
    cset: ConvexSet
    g: object
    phi: object
    S: LinearMap
    c1: float
    c2: float

    def __post_init__(self):
        if not (self.c1 > 0 and self.c2 > 0):
            raise ValueError("Bregman-Lipschitz coefficients must be positive")
        if self.cset.dim != self.spec.dim:
            raise DimensionError("set and Legendre spec disagree on dimension")
        if self.S.A.shape != (self.spec.dim, self.spec.dim):
            raise DimensionError(f"S has shape {self.S.A.shape}, expected dim {self.spec.dim}")
        for name in ("g", "phi"):
            d = getattr(getattr(self, name), "dim", None)
            if d is not None and d != self.spec.dim:
                raise DimensionError(f"{name} has dim {d}, expected {self.spec.dim}")

    @property
    def step_bound(self):
        """p = min(1/c1, 1/c2); admissible step sizes lie in (0, p)."""
        return min(1.0 / self.c1, 1.0 / self.c2)


def evaluate(g, x, y):
    x, y = as_vector(x), as_vector(y)
    if x.size != y.size:
        raise DimensionError("x and y differ in dimension")
    return g(x, y)


@dataclass
class CheckReport:
    name: str
    value: float
    passed: bool
    worst_sample: tuple = field(default=None)

    def __bool__(self):
        return self.passed


def check_monotone(g, samples, tol=DEFAULT_TOL.atol):
    """max over samples of g(x, y) + g(y, x); monotone iff <= tol."""
    worst, arg = -np.inf, None
    for x, y in samples:
        x, y = as_vector(x), as_vector(y)
        v = g(x, y) + g(y, x)
        if v > worst:
            worst, arg = v, (x, y)
    return CheckReport("monotone", worst, worst <= tol, arg)


def check_pseudomonotone(g, samples, tol=DEFAULT_TOL.atol):
    """Worst g(y, x) over samples with g(x, y) >= 0."""
    worst, arg = -np.inf, None
    for x, y in samples:
        x, y = as_vector(x), as_vector(y)
        if g(x, y) >= 0:
            v = g(y, x)
            if v > worst:
                worst, arg = v, (x, y)
    return CheckReport("pseudomonotone", worst, worst <= tol, arg)


def check_bregman_lipschitz(g, spec, c1, c2, samples, tol=DEFAULT_TOL.atol):
    """min over samples of g(x,y) + g(y,z) - g(x,z) + c1 D(y,x) + c2 D(z,y)."""
    worst, arg = np.inf, None
    for x, y, z in samples:
        x, y, z = as_vector(x), as_vector(y), as_vector(z)
        s = (g(x, y) + g(y, z) - g(x, z)
             + c1 * bregman_distance(spec, y, x) + c2 * bregman_distance(spec, z, y))
        if s < worst:
            worst, arg = s, (x, y, z)
    return CheckReport("bregman-lipschitz", worst, worst >= -tol, arg)


def check_bregman_nonexpansive(S, spec, samples, tol=DEFAULT_TOL.atol):
    """max over samples of D(Sx, Sy) / D(x, y)."""
    worst, arg = -np.inf, None
    for x, y in samples:
        x, y = as_vector(x), as_vector(y)
        den = bregman_distance(spec, x, y)
        if den == 0.0:
            raise DegenerateSample(f"sample pair with x == y: {x}")
        r = bregman_distance(spec, S(x), S(y)) / den
        if r > worst:
            worst, arg = r, (x, y)
    return CheckReport("bregman-nonexpansive", worst, worst <= 1.0 + tol, arg)


def ep_violation(g, ystar, xs):
    """max over the candidate points xs of g(x, y*); y* solves EP(g) when <= 0."""
    ystar = as_vector(ystar)
    return max(g(as_vector(x), ystar) for x in xs)


def _is_diagonal(m):
    return not np.any(m - np.diag(np.diag(m)))


def _prox_objective(spec, g, anchor, lam, at):
    def objective(y):
        if not spec.in_domain(y):
            return np.inf
        return lam * g(at, y) + bregman_distance(spec, y, anchor)

    def gradient(y):
        return lam * g.grad_y(at, y) + grad_f(spec, y) - grad_f(spec, anchor)

    return objective, gradient


def prox_step(spec, g, cset, anchor, lam, *, at=None, tol=DEFAULT_TOL):
    """argmin over y in C of lam * g(at, y) + D_f(y, anchor).

    ``at`` defaults to ``anchor``; the extragradient second step passes the
    first-step point here while keeping the Bregman anchor.
    """
    anchor = as_vector(anchor, spec.dim)
    at = anchor if at is None else as_vector(at, spec.dim)
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    if not spec.in_domain(anchor):
        raise DomainError(f"prox anchor {anchor} outside int dom f")
    if lam == 0 or isinstance(g, ZeroBifunction):
        return bregman_project(spec, cset, anchor, tol=tol)

    if spec.kind is Kind.SQUARED_NORM and isinstance(g, QuadraticBifunction):
        # stationarity: (I + 2 lam Q) y = anchor - lam R' at
        if spec.dim == 1:
            q, r = g.scalar_coefficients
            lhs = 1.0 + 2.0 * lam * q
            y = (anchor - (lam * r) * at) / lhs
        else:
            rhs = anchor - lam * g.R.T @ at
            lhs = np.eye(spec.dim) + 2.0 * lam * g.Q
            y = np.linalg.solve(lhs, rhs)
        if isinstance(cset, Box) and (spec.dim == 1 or _is_diagonal(lhs)):
            # separable strictly convex objective: clamping each coordinate is exact
            return cset.euclidean_project(y)
        if cset.contains(y, tol=0.0):
            return y

    objective, gradient = _prox_objective(spec, g, anchor, lam, at)
    start = bregman_project(spec, cset, anchor, tol=tol)
    return projected_gradient(gradient, cset.euclidean_project, start, step=1.0,
                              tol=1e-12, max_iters=100_000, objective=objective)


def prox_certificate(spec, g, cset, anchor, lam, y, *, at=None):
    """max over w in C of <y - w, lam grad_y g(at, y) + grad f(y) - grad f(anchor)>.

    First-order optimality of the prox subproblem holds iff this is <= 0.
    """
    anchor = as_vector(anchor, spec.dim)
    at = anchor if at is None else as_vector(at, spec.dim)
    d = lam * g.grad_y(at, y) + grad_f(spec, y) - grad_f(spec, anchor)
    return float(y @ d) - cset.min_linear(d)


RESOLVENT_RELAXATION = 0.5
RESOLVENT_MAX_ITERS = 10_000


def resolvent(spec, phi, cset, x, *, tol=DEFAULT_TOL, inner_tol=1e-13):
    """The point z of C with phi(z, y) + <grad f(z) - grad f(x), y - z> >= 0 for all y in C.

    For the zero bifunction this is the Bregman projection of x. Otherwise a
    relaxed fixed-point iteration z <- (z + argmin{phi(z, .) + D_f(., x)}) / 2
    is run.
    """
    x = as_vector(x, spec.dim)
    if isinstance(phi, ZeroBifunction):
        return bregman_project(spec, cset, x, tol=tol)
    z = bregman_project(spec, cset, x, tol=tol)
    for _ in range(RESOLVENT_MAX_ITERS):
        target = prox_step(spec, phi, cset, x, 1.0, at=z, tol=tol)
        nxt = (1.0 - RESOLVENT_RELAXATION) * z + RESOLVENT_RELAXATION * target
        if np.max(np.abs(target - z)) < inner_tol:
            return target
        z = nxt
    raise ConvergenceError(f"resolvent iteration did not settle in {RESOLVENT_MAX_ITERS} steps")


def resolvent_residual(spec, phi, x, z, ys):
    """min over sample points y of phi(z, y) + <grad f(z) - grad f(x), y - z>; >= 0 at the resolvent."""
    d = grad_f(spec, z) - grad_f(spec, x)
    return min(phi(z, y) + float(d @ (y - z)) for y in np.asarray(ys))


def resolvent_descent_check(spec, phi, cset, u, x, *, tol=DEFAULT_TOL):
    """D_f(u, x) - D_f(u, Res x) - D_f(Res x, x) for a fixed point u of the resolvent."""
    r = resolvent(spec, phi, cset, x, tol=tol)
    return (bregman_distance(spec, u, x) - bregman_distance(spec, u, r)
            - bregman_distance(spec, r, x))


def _pairs(cset, rng, count, distinct=False):
    xs, ys = cset.sample(rng, count), cset.sample(rng, count)
    if distinct:
        keep = np.any(xs != ys, axis=1)
        xs, ys = xs[keep], ys[keep]
    return list(zip(xs, ys))


def validate_problem(problem, rng, samples=200, tol=DEFAULT_TOL.atol):
    """Sampled checks of the structural assumptions on g, phi and S.

    Weak continuity and the upper hemicontinuity condition are not
    checkable from samples and hold by construction for quadratic
    bifunctions; pseudomonotonicity follows from monotonicity.
    """
    spec, cset, g, S = problem.spec, problem.cset, problem.g, problem.S
    pairs = _pairs(cset, rng, samples)
    if spec.kind is Kind.NEGATIVE_ENTROPY:
        pairs = [(x, y) for x, y in pairs if spec.in_domain(x) and spec.in_domain(y)]
    triples = [(x, y, z) for (x, y), z in zip(pairs, cset.sample(rng, len(pairs)))
               if spec.in_domain(z)]
    reports = [
        CheckReport("g(x, x) = 0", max(abs(g(x, x)) for x, _ in pairs),
                    max(abs(g(x, x)) for x, _ in pairs) <= tol),
        check_monotone(g, pairs, tol),
        check_bregman_lipschitz(g, spec, problem.c1, problem.c2, triples, tol),
    ]
    if isinstance(g, QuadraticBifunction):
        lo = float(np.min(np.linalg.eigvalsh(g.Q)))
        reports.append(CheckReport("g(x, .) convex", lo, lo >= -tol))
    distinct = [(x, y) for x, y in pairs if np.any(x != y)]
    reports.append(check_bregman_nonexpansive(S, spec, distinct, tol))
    worst = max(0.0 if cset.contains(S(x), 1e-9) else 1.0 for x, _ in pairs)
    reports.append(CheckReport("S maps C into C", worst, worst == 0.0))
    if isinstance(problem.phi, QuadraticBifunction):
        phi = problem.phi
        b1 = max(abs(phi(x, x)) for x, _ in pairs)
        reports.append(CheckReport("phi(x, x) = 0", b1, b1 <= tol))
        rep = check_monotone(phi, pairs, tol)
        rep.name = "phi monotone"
        reports.append(rep)
    return reports
