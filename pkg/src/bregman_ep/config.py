"""INI-style run configuration with ``[problem]``, ``[schedule]`` and ``[run]`` sections.

Every section accepts ``preset = <name>``; other keys override preset
values. Vectors are comma separated, matrices use ``;`` between rows.

    [problem]
    preset = paper-example

    [schedule]
    preset = paper-example
    lambda = 0.03125

    [run]
    x1 = 5
    anchor = 1
    max_iters = 20000
"""
import configparser
from dataclasses import dataclass, replace

import numpy as np

from .errors import DimensionError
from .legendre import LegendreSpec
from .presets import PRESETS
from .problem import LinearMap, ProblemBundle, QuadraticBifunction, ZeroBifunction
from .sets import Ball, Box, Halfspace, Simplex
from .solver import ParamSchedule, RunConfig


class ConfigError(ValueError):
    pass


SCHEDULE_PRESETS = {
    "paper-example": ParamSchedule.paper_example,
    "paper-literal": ParamSchedule.paper_literal,
    "projection-only": ParamSchedule.paper_example,
    "multi-omega": ParamSchedule.multi_omega,
}

_SCHEDULE_KEYS = {
    "lambda": ("lam", float),
    "alpha1_scale": ("alpha1_scale", float),
    "alpha1_power": ("alpha1_power", float),
    "alpha1_offset": ("alpha1_offset", float),
    "alpha_rule": ("alpha_rule", str),
    "beta_base": ("beta_base", float),
    "beta_offset": ("beta_offset", float),
    "delta": ("delta", float),
}


@dataclass
class LoadedConfig:
    text: str
    problem: ProblemBundle
    schedule: ParamSchedule
    run: RunConfig
    samples: int = 200
    seed: int = 0
    horizon: int = None

    @property
    def validation_horizon(self):
        return self.horizon or self.run.max_iters


def parse_vector(text):
    try:
        return np.array([float(v) for v in text.replace(",", " ").split()], dtype=float)
    except ValueError as exc:
        raise ConfigError(f"bad vector {text!r}") from exc


def parse_matrix(text):
    rows = [parse_vector(r) for r in text.split(";") if r.strip()]
    if not rows or any(r.size != rows[0].size for r in rows):
        raise ConfigError(f"bad matrix {text!r}")
    return np.vstack(rows)


def _bifunction(sec, prefix):
    if f"{prefix}_q" in sec:
        return QuadraticBifunction(parse_matrix(sec[f"{prefix}_q"]), parse_matrix(sec[f"{prefix}_r"]),
                                   parse_matrix(sec[f"{prefix}_p"]))
    spec = sec[prefix].strip()
    if spec == "zero":
        return ZeroBifunction()
    coef = parse_vector(spec)
    if coef.size != 3:
        raise ConfigError(f"{prefix} needs 'zero' or three coefficients q, r, p")
    return QuadraticBifunction.scalar(*coef)


def _problem(sec):
    name = sec.get("preset", "paper-example")
    if name not in PRESETS:
        raise ConfigError(f"unknown problem preset {name!r}")
    base = PRESETS[name]["problem"]()
    fields = {}
    dim = int(sec.get("dim", base.spec.dim))
    if "legendre" in sec or "dim" in sec:
        kind = sec.get("legendre", base.spec.kind.value)
        fields["spec"] = (LegendreSpec.squared_norm(dim) if kind == "squared-norm"
                          else LegendreSpec.negative_entropy(dim) if kind == "negative-entropy"
                          else None)
        if fields["spec"] is None:
            raise ConfigError(f"unknown Legendre function {kind!r}")
    if "set" in sec:
        kind = sec["set"]
        if kind == "box":
            fields["cset"] = Box(parse_vector(sec["lower"]), parse_vector(sec["upper"]))
        elif kind == "ball":
            fields["cset"] = Ball(parse_vector(sec["center"]), float(sec["radius"]))
        elif kind == "halfspace":
            fields["cset"] = Halfspace(parse_vector(sec["normal"]), float(sec["offset"]))
        elif kind == "simplex":
            fields["cset"] = Simplex(dim)
        else:
            raise ConfigError(f"unknown set {kind!r}")
    if "g" in sec or "g_q" in sec:
        fields["g"] = _bifunction(sec, "g")
    if "phi" in sec or "phi_q" in sec:
        fields["phi"] = _bifunction(sec, "phi")
    if "s_matrix" in sec:
        fields["S"] = LinearMap(parse_matrix(sec["s_matrix"]))
    elif "s" in sec:
        fields["S"] = LinearMap.scaling(float(sec["s"]), dim)
    elif dim != base.spec.dim and base.S.A.shape == (1, 1):
        fields["S"] = LinearMap.scaling(float(base.S.A[0, 0]), dim)
    for key in ("c1", "c2"):
        if key in sec:
            fields[key] = float(sec[key])
    return name, replace(base, **fields)


def _schedule(sec):
    name = sec.get("preset", "paper-example")
    if name not in SCHEDULE_PRESETS:
        raise ConfigError(f"unknown schedule preset {name!r}")
    fields = {}
    for key, (attr, cast) in _SCHEDULE_KEYS.items():
        if key in sec:
            fields[attr] = cast(sec[key])
    if "gamma" in sec:
        fields["gamma"] = tuple(parse_vector(sec["gamma"]))
    return replace(SCHEDULE_PRESETS[name](), **fields)


def _run(sec, preset, problem):
    dim = problem.spec.dim
    defaults = PRESETS[preset]

    def fit(v):
        v = np.atleast_1d(np.asarray(v, float))
        return np.full(dim, v[0]) if v.size == 1 and dim > 1 else v

    x1 = fit(parse_vector(sec["x1"]) if "x1" in sec else defaults["x1"])
    if "anchor" in sec:
        anchor = fit(parse_vector(sec["anchor"]))
    else:
        # the worked example never fixes the anchor; default to the start point
        anchor = x1.copy() if defaults["anchor"] is None else fit(defaults["anchor"])
    target = sec.get("target", defaults["target"])
    if isinstance(target, str):
        target = None if target.strip() == "none" else parse_vector(target)
    return RunConfig(
        x1=x1,
        anchor_u=anchor,
        max_iters=int(sec.get("max_iters", 20_000)),
        residual_tol=float(sec.get("tol", 1e-10)),
        track_target=None if target is None else fit(target),
        wiring=sec.get("wiring", defaults["wiring"]),
    )


def loads(text):
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text)
        prob_sec = parser["problem"] if parser.has_section("problem") else {}
        sched_sec = parser["schedule"] if parser.has_section("schedule") else {}
        run_sec = parser["run"] if parser.has_section("run") else {}
        preset, problem = _problem(prob_sec)
        schedule = _schedule(sched_sec)
        run_cfg = _run(run_sec, preset, problem)
        extra = dict(samples=int(run_sec.get("samples", 200)), seed=int(run_sec.get("seed", 0)))
        if "horizon" in run_sec:
            extra["horizon"] = int(run_sec["horizon"])
    except ConfigError:
        raise
    except (configparser.Error, KeyError, ValueError, TypeError, DimensionError) as exc:
        raise ConfigError(str(exc)) from exc
    return LoadedConfig(text, problem, schedule, run_cfg, **extra)


def load(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return loads(fh.read())
