"""Legendre functions and the Bregman quantities built from them.

Points of the space and of its dual are both plain 1-D float arrays; the
duality pairing is the Euclidean inner product.
"""
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DEFAULT_TOL, DimensionError, DomainError, WeightError


class Kind(enum.Enum):
    SQUARED_NORM = "squared-norm"
    NEGATIVE_ENTROPY = "negative-entropy"


@dataclass(frozen=True)
class LegendreSpec:
    kind: Kind
    dim: int

    def __post_init__(self):
        if int(self.dim) < 1:
            raise DimensionError(f"dim must be >= 1, got {self.dim}")

    @classmethod
    def squared_norm(cls, dim=1):
        return cls(Kind.SQUARED_NORM, dim)

    @classmethod
    def negative_entropy(cls, dim=1):
        return cls(Kind.NEGATIVE_ENTROPY, dim)

    def in_domain(self, x):
        """True when x lies in int dom f."""
        if self.kind is Kind.NEGATIVE_ENTROPY:
            return bool(np.all(x > 0))
        return True


class ClampRecord:
    """Counts Bregman distances clamped from tiny negatives to zero.

    Owned by a caller (e.g. a single solver run); the kernel functions stay
    free of shared state.
    """

    def __init__(self):
        self.count = 0
        self.worst = 0.0

    def note(self, value):
        self.count += 1
        self.worst = min(self.worst, value)


def as_vector(x, dim=None):
    """Coerce to a finite 1-D float array, optionally checking its length."""
    if type(x) is np.ndarray and x.dtype == np.float64 and x.ndim == 1 and x.size:
        if dim is None or x.size == dim:
            if x.size == 1:
                if math.isfinite(x[0]):
                    return x
            elif x.size <= 8:
                if all(map(math.isfinite, x.tolist())):
                    return x
            elif np.isfinite(x).all():
                return x
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise DimensionError(f"expected a vector, got shape {v.shape}")
    if v.size == 0:
        raise DimensionError("empty vector")
    if dim is not None and v.size != dim:
        raise DimensionError(f"expected dimension {dim}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise DomainError(f"non-finite component in {v}")
    return v


def _primal(spec, x):
    x = as_vector(x, spec.dim)
    if spec.kind is Kind.NEGATIVE_ENTROPY and not x.min() > 0:
        raise DomainError(f"negative entropy needs strictly positive input, got {x}")
    return x


def f_eval(spec, x):
    x = _primal(spec, x)
    if spec.kind is Kind.SQUARED_NORM:
        return 0.5 * float(x @ x)
    return float(np.sum(x * np.log(x)))


def _grad(spec, x):
    # may alias x; callers that hand the result out copy it
    if spec.kind is Kind.SQUARED_NORM:
        return x
    return 1.0 + np.log(x)


def grad_f(spec, x):
    x = _primal(spec, x)
    return x.copy() if spec.kind is Kind.SQUARED_NORM else _grad(spec, x)


def conjugate_eval(spec, xstar):
    xstar = as_vector(xstar, spec.dim)
    if spec.kind is Kind.SQUARED_NORM:
        return 0.5 * float(xstar @ xstar)
    with np.errstate(over="ignore"):
        value = float(np.sum(np.exp(xstar - 1.0)))
    if not math.isfinite(value):
        raise OverflowError(f"exp overflow in conjugate at {xstar}")
    return value


def _grad_conj(spec, xstar):
    if spec.kind is Kind.SQUARED_NORM:
        return xstar
    with np.errstate(over="ignore"):
        out = np.exp(xstar - 1.0)
    if not math.isfinite(out.sum()):
        raise OverflowError(f"exp overflow in conjugate gradient at {xstar}")
    return out


def grad_conjugate(spec, xstar):
    return _grad_conj(spec, as_vector(xstar, spec.dim).copy())


def _clamped(value, tol, record):
    if value >= 0.0:
        return value
    if value >= -tol.clamp:
        if record is not None:
            record.note(value)
        return 0.0
    raise ArithmeticError(f"Bregman distance {value!r} is negative beyond roundoff")


def bregman_distance(spec, y, x, *, tol=DEFAULT_TOL, record=None):
    """D_f(y, x) = f(y) - f(x) - <y - x, grad f(x)>."""
    y = _primal(spec, y)
    x = _primal(spec, x)
    if spec.kind is Kind.SQUARED_NORM:
        d = y - x
        value = 0.5 * float(d @ d)
    else:
        # y log(y/x) - y + x, written to avoid cancellation between f(y) and f(x)
        value = float(np.sum(y * np.log(y / x) - y + x))
    return _clamped(value, tol, record)


def v_f(spec, x, xstar):
    """V_f(x, x*) = f(x) - <x, x*> + f*(x*), equal to D_f(x, grad f*(x*))."""
    x = _primal(spec, x)
    xstar = as_vector(xstar, spec.dim)
    return f_eval(spec, x) - float(x @ xstar) + conjugate_eval(spec, xstar)


def check_weights(weights, count, tol=DEFAULT_TOL):
    if len(weights) != count:
        raise WeightError(f"need {count} weights, got {len(weights)}")
    if not min(weights) > 0:
        raise WeightError(f"weights must be positive: {list(weights)}")
    total = math.fsum(weights)
    if abs(total - 1.0) > tol.weight_sum:
        raise WeightError(f"weights sum to {total!r}, not 1")
    return weights


def dual_average(spec, weights, points, *, tol=DEFAULT_TOL):
    """grad f*( sum_i t_i grad f(x_i) ).

    Arithmetic weighted mean for the squared norm, weighted geometric mean
    for negative entropy.
    """
    t = check_weights(weights, len(points), tol)
    acc = None
    for ti, p in zip(t, points):
        term = ti * _grad(spec, _primal(spec, p))
        if acc is None:
            acc = term
        else:
            acc += term
    return _grad_conj(spec, acc)
