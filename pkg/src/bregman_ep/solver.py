"""Halpern-anchored extragradient iteration with Bregman averaging.

One iteration from x (index n, anchor u):

    y = argmin_C lam g(x, .) + D(., x)          z = argmin_C lam g(y, .) + D(., x)
    v = avg(delta: Res x, 1-delta: Res z)        w = avg(gamma: v, z, S z)
    u_n = Res w                                  k = avg(beta: w, 1-beta: S w)
    h = avg(alpha: u, x, u_n, k)                 x+ = Proj_C h

where avg is the dual average grad f*(sum t_i grad f(.)) and Res is the
resolvent of phi.
"""
import enum
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DEFAULT_TOL, BregmanError, StageError
from .legendre import ClampRecord, as_vector, bregman_distance, dual_average
from .problem import prox_step, resolvent
from .sets import bregman_project, variational_slack


def _scalar(n):
    return isinstance(n, (int, float, np.integer, np.floating))


def _as_index(n):
    return float(n) if _scalar(n) else np.asarray(n, float)


@dataclass(frozen=True)
class ParamSchedule:
    """Closed-form parameter sequences, indexed from n = 1.

    alpha_{n,1} = alpha1_scale / (n + alpha1_offset) ** alpha1_power.
    With ``alpha_rule='balanced'`` the other three alpha weights split the
    remainder equally; ``'literal'`` uses 1/3 - 3/(4n) as printed for the
    worked example (which does not sum to one).
    beta_n = beta_base + 1 / (n + beta_offset).
    """

    alpha1_scale: float = 0.25
    alpha1_power: float = 1.0
    alpha1_offset: float = 0.0
    alpha_rule: str = "balanced"
    beta_base: float = 0.5
    beta_offset: float = 2.0
    delta: float = 0.5
    gamma: tuple = (1 / 3, 1 / 3, 1 / 3)
    lam: float = 1 / 32

    def __post_init__(self):
        if self.alpha_rule not in ("balanced", "literal"):
            raise ValueError(f"unknown alpha rule {self.alpha_rule!r}")
        object.__setattr__(self, "gamma", tuple(float(v) for v in self.gamma))
        if len(self.gamma) != 3:
            raise ValueError("gamma needs three weights")

    def alpha1(self, n):
        return self.alpha1_scale / (_as_index(n) + self.alpha1_offset) ** self.alpha1_power

    def alpha(self, n):
        """(alpha_{n,1}, ..., alpha_{n,4}); works elementwise on arrays of n."""
        a1 = self.alpha1(n)
        if self.alpha_rule == "balanced":
            rest = (1.0 - a1) / 3.0
        else:
            rest = 1.0 / 3.0 - 3.0 / (4.0 * _as_index(n))
        return a1, rest, rest, rest

    def beta(self, n):
        return self.beta_base + 1.0 / (_as_index(n) + self.beta_offset)

    def delta_at(self, n):
        return self.delta if _scalar(n) else np.full(np.shape(n), self.delta)

    def gamma_at(self, n):
        return self.gamma if _scalar(n) else tuple(np.full(np.shape(n), g) for g in self.gamma)

    def lam_at(self, n):
        return self.lam if _scalar(n) else np.full(np.shape(n), self.lam)

    @classmethod
    def paper_example(cls):
        return cls()

    @classmethod
    def paper_literal(cls):
        return cls(alpha_rule="literal", beta_offset=0.0)

    @classmethod
    def multi_omega(cls):
        return cls(alpha1_scale=1.0, alpha1_power=0.5, alpha1_offset=1.0)


@dataclass(frozen=True)
class Violation:
    rule: str
    n: int
    value: float
    count: int = 1  # offending indices for this rule, n is the first

    def __str__(self):
        more = f", {self.count} indices in total" if self.count > 1 else ""
        return f"n={self.n}: {self.rule} (value {self.value!r}{more})"


@dataclass
class ScheduleReport:
    horizon: int
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def lines(self):
        if self.ok:
            return [f"schedule valid on n = 1..{self.horizon}"]
        return [str(v) for v in self.violations]


def _first_bad(mask, ns, values, rule, out):
    bad = np.nonzero(mask)[0]
    if bad.size:
        i = bad[0]
        out.append(Violation(rule, int(ns[i]), float(values[i]), int(bad.size)))


def validate_schedule(sched, horizon, c1, c2, *, floor=1e-3, tol=DEFAULT_TOL):
    """Check the pointwise parameter conditions on n = 1..horizon.

    The liminf conditions are replaced by a floor on the minimum over the
    second half of the horizon. Each rule reports its first offending n and
    the number of offending indices.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    ns = np.arange(1, horizon + 1)
    out = []
    alphas = [np.asarray(a, float) for a in sched.alpha(ns)]
    gammas = [np.asarray(g, float) for g in sched.gamma_at(ns)]
    for i, a in enumerate(alphas, 1):
        _first_bad((a <= 0) | (a >= 1), ns, a, f"alpha_{i} not in (0, 1)", out)
    s = sum(alphas)
    _first_bad(np.abs(s - 1) > tol.weight_sum, ns, s, "alpha weights do not sum to 1", out)
    a1 = alphas[0]
    _first_bad(np.diff(a1) > 0, ns[1:], a1[1:], "alpha_1 increases (must vanish)", out)
    for i, g in enumerate(gammas, 1):
        _first_bad((g <= 0) | (g >= 1), ns, g, f"gamma_{i} not in (0, 1)", out)
    s = sum(gammas)
    _first_bad(np.abs(s - 1) > tol.weight_sum, ns, s, "gamma weights do not sum to 1", out)
    b = np.asarray(sched.beta(ns), float)
    _first_bad((b <= 0) | (b >= 1), ns, b, "beta not in (0, 1)", out)
    d = np.asarray(sched.delta_at(ns), float)
    _first_bad((d <= 0) | (d >= 1), ns, d, "delta not in (0, 1)", out)
    lam = np.asarray(sched.lam_at(ns), float)
    p = min(1.0 / c1, 1.0 / c2)
    _first_bad((lam <= 0) | (lam >= p), ns, lam, f"lambda not in (0, {p!r})", out)

    tail = slice((horizon - 1) // 2, horizon)
    products = {
        "alpha_2 * alpha_3": alphas[1] * alphas[2],
        "gamma_1 * gamma_2": gammas[0] * gammas[1],
        "gamma_1 * gamma_3": gammas[0] * gammas[2],
        "gamma_2 * gamma_3": gammas[1] * gammas[2],
        "beta * (1 - beta)": b * (1 - b),
    }
    for rule, vals in products.items():
        t = vals[tail]
        i = int(np.argmin(t))
        if t[i] < floor:
            out.append(Violation(f"tail minimum of {rule} below {floor}", int(ns[tail][i]), float(t[i])))
    return ScheduleReport(horizon, out)


@dataclass(frozen=True)
class IterateState:
    """x is the current iterate x_n; y..h are the intermediates of the
    iteration that produced it (None for the starting state)."""

    n: int
    x: np.ndarray
    y: np.ndarray = None
    z: np.ndarray = None
    v: np.ndarray = None
    w: np.ndarray = None
    u: np.ndarray = None
    k: np.ndarray = None
    h: np.ndarray = None

    @classmethod
    def initial(cls, x1):
        return cls(1, as_vector(x1))


def _iterate(problem, sched, state, anchor_u, res, tol):
    spec, cset, S = problem.spec, problem.cset, problem.S
    n, x = state.n, state.x
    lam = sched.lam_at(n)
    a = sched.alpha(n)
    g1, g2, g3 = sched.gamma_at(n)
    beta, delta = sched.beta(n), sched.delta_at(n)
    stage = "y"
    try:
        y = prox_step(spec, problem.g, cset, x, lam, tol=tol)
        stage = "z"
        z = prox_step(spec, problem.g, cset, x, lam, at=y, tol=tol)
        stage = "v"
        v = dual_average(spec, (delta, 1 - delta), (res(x), res(z)), tol=tol)
        stage = "w"
        w = dual_average(spec, (g1, g2, g3), (v, z, S(z)), tol=tol)
        stage = "u"
        un = res(w)
        stage = "k"
        k = dual_average(spec, (beta, 1 - beta), (w, S(w)), tol=tol)
        stage = "h"
        h = dual_average(spec, a, (anchor_u, x, un, k), tol=tol)
        stage = "x"
        x_next = bregman_project(spec, cset, h, tol=tol)
    except (BregmanError, ArithmeticError, ValueError) as exc:
        raise StageError(stage, exc) from exc
    return IterateState(n + 1, x_next, y, z, v, w, un, k, h)


def step(problem, sched, state, anchor_u, *, tol=DEFAULT_TOL):
    """One full iteration, with the resolvent of phi in the v and u stages."""
    anchor_u = as_vector(anchor_u, problem.spec.dim)

    def res(p):
        return resolvent(problem.spec, problem.phi, problem.cset, p, tol=tol)

    return _iterate(problem, sched, state, anchor_u, res, tol)


def projection_step(problem, sched, state, anchor_u, *, tol=DEFAULT_TOL):
    """The same iteration with Bregman projections onto C wired in place of
    the resolvent (phi is ignored)."""
    anchor_u = as_vector(anchor_u, problem.spec.dim)

    def res(p):
        return bregman_project(problem.spec, problem.cset, p, tol=tol)

    return _iterate(problem, sched, state, anchor_u, res, tol)


def lemma_arg_slack(problem, xstar, x, y, z, lam, *, d_start=None):
    """D(x*, x) - (1 - lam c1) D(y, x) - (1 - lam c2) D(z, y) - D(x*, z).

    Nonnegative whenever x* solves the equilibrium problem for g.
    ``d_start`` may carry an already computed D(x*, x).
    """
    spec = problem.spec
    if d_start is None:
        d_start = bregman_distance(spec, xstar, x)
    return (d_start
            - (1 - lam * problem.c1) * bregman_distance(spec, y, x)
            - (1 - lam * problem.c2) * bregman_distance(spec, z, y)
            - bregman_distance(spec, xstar, z))


class Status(enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERS = "MaxIters"
    ERROR = "Error"


@dataclass(frozen=True)
class RunConfig:
    x1: np.ndarray
    anchor_u: np.ndarray
    max_iters: int = 20_000
    residual_tol: float = 1e-10
    track_target: np.ndarray = None
    wiring: str = "resolvent"

    def __post_init__(self):
        if not self.residual_tol > 0:
            raise ValueError("residual_tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if self.wiring not in ("resolvent", "projection"):
            raise ValueError(f"unknown wiring {self.wiring!r}")


@dataclass(frozen=True)
class TraceRow:
    n: int
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    residual: float
    df_target: float
    lemma_arg_slack: float
    projection_cert_slack: float


@dataclass
class RunResult:
    solution: np.ndarray
    trace: list
    status: Status
    states: list = None
    error: StageError = None
    clamps: int = 0
    wall_time: float = 0.0

    @property
    def iterations(self):
        return len(self.trace)


def run(problem, sched, cfg, *, tol=DEFAULT_TOL, keep_states=False):
    """Iterate until ||x_{n+1} - x_n||_inf < residual_tol or max_iters steps.

    Row n of the trace describes the iteration that starts from x_n.
    Stage failures end the run with status ERROR and the partial trace.
    """
    spec = problem.spec
    advance = step if cfg.wiring == "resolvent" else projection_step
    anchor = as_vector(cfg.anchor_u, spec.dim)
    target = None if cfg.track_target is None else as_vector(cfg.track_target, spec.dim)
    record = ClampRecord()
    state = IterateState.initial(as_vector(cfg.x1, spec.dim))
    trace, states = [], [state] if keep_states else None
    status, error = Status.MAX_ITERS, None
    t0 = time.perf_counter()
    for _ in range(cfg.max_iters):
        try:
            nxt = advance(problem, sched, state, anchor, tol=tol)
        except StageError as exc:
            status, error = Status.ERROR, exc
            break
        x, x_next = state.x, nxt.x
        residual = float(np.abs(x_next - x).max())
        if target is not None:
            df = bregman_distance(spec, target, x, tol=tol, record=record)
            slack = lemma_arg_slack(problem, target, x, nxt.y, nxt.z, sched.lam_at(state.n),
                                    d_start=df)
        else:
            df = slack = math.nan
        cert = variational_slack(spec, problem.cset, nxt.h, x_next)
        trace.append(TraceRow(state.n, x, nxt.y, nxt.z, residual, df, slack, cert))
        state = nxt
        if keep_states:
            states.append(state)
        if residual < cfg.residual_tol:
            status = Status.CONVERGED
            break
    return RunResult(state.x, trace, status, states, error, record.count,
                     time.perf_counter() - t0)


def burn_in_index(values):
    """Smallest index after which ``values`` never increases."""
    v = np.asarray(values, float)
    ups = np.nonzero(np.diff(v) > 0)[0]
    return 0 if ups.size == 0 else int(ups[-1] + 1)
