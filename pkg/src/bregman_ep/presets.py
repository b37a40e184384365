"""Ready-made problems for the 1D worked example and its variants."""
import numpy as np

from .legendre import LegendreSpec
from .problem import LinearMap, ProblemBundle, QuadraticBifunction, ZeroBifunction
from .sets import Box
from .solver import ParamSchedule, RunConfig


def paper_g():
    """g(x, y) = 16 y^2 + 9 x y - 25 x^2."""
    return QuadraticBifunction.scalar(16.0, 9.0, -25.0)


def paper_problem():
    return ProblemBundle(
        spec=LegendreSpec.squared_norm(1),
        cset=Box.interval(0.0, 2.0),
        g=paper_g(),
        phi=ZeroBifunction(),
        S=LinearMap.scaling(1.0 / 3.0),
        c1=9.0,
        c2=9.0,
    )


def multi_omega_problem():
    # every point of C is a solution: Omega = C
    return ProblemBundle(
        spec=LegendreSpec.squared_norm(1),
        cset=Box.interval(0.0, 2.0),
        g=ZeroBifunction(),
        phi=ZeroBifunction(),
        S=LinearMap.identity(1),
        c1=9.0,
        c2=9.0,
    )


PRESETS = {
    "paper-example": dict(
        problem=paper_problem, schedule=ParamSchedule.paper_example,
        x1=5.0, anchor=None, wiring="resolvent", target=0.0),
    "projection-only": dict(
        problem=paper_problem, schedule=ParamSchedule.paper_example,
        x1=5.0, anchor=None, wiring="projection", target=0.0),
    "multi-omega": dict(
        problem=multi_omega_problem, schedule=ParamSchedule.multi_omega,
        x1=5.0, anchor=0.7, wiring="resolvent", target=None),
}


def preset_run_config(name, **overrides):
    p = PRESETS[name]
    x1 = np.atleast_1d(float(overrides.pop("x1", p["x1"])))
    anchor = overrides.pop("anchor", p["anchor"])
    # the worked example never fixes the anchor; default to the start point
    anchor = x1.copy() if anchor is None else np.atleast_1d(float(anchor))
    target = overrides.pop("target", p["target"])
    target = None if target is None else np.atleast_1d(float(target))
    return RunConfig(x1=x1, anchor_u=anchor, track_target=target, wiring=p["wiring"], **overrides)
