"""Bregman-distance extragradient solver for equilibrium and fixed-point problems."""
from .errors import (
    BregmanError, ConvergenceError, DegenerateSample, DimensionError, DomainError,
    EmptyGridError, InfeasibleError, StageError, Tolerances, WeightError,
)
from .legendre import (
    Kind, LegendreSpec, bregman_distance, conjugate_eval, dual_average, f_eval,
    grad_conjugate, grad_f, v_f,
)
from .sets import Ball, Box, Halfspace, Simplex, bregman_project, contains, projection_descent_check
from .problem import (
    LinearMap, ProblemBundle, QuadraticBifunction, ZeroBifunction, check_bregman_lipschitz,
    check_bregman_nonexpansive, check_monotone, evaluate, prox_step, resolvent,
    resolvent_descent_check,
)
from .solver import (
    IterateState, ParamSchedule, RunConfig, RunResult, Status, TraceRow, lemma_arg_slack,
    projection_step, run, step, validate_schedule,
)
from .oracle import GridSpec, golden_section, grid_argmin, projected_gradient

__version__ = "0.1.0"
