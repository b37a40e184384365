"""CSV serialisation of solver traces.

Header: ``n,x_0..x_{d-1},residual,df_target,lemma_arg_slack`` followed by
``y_*``, ``z_*`` and ``projection_cert_slack``. Floats are written with 17
significant digits, which round-trips IEEE doubles exactly.
"""
import csv
import json
from dataclasses import dataclass

import numpy as np

from .solver import TraceRow


def _fmt(v):
    return format(float(v), ".17g")


def header(dim):
    vec = lambda name: [f"{name}_{i}" for i in range(dim)]
    return (["n"] + vec("x") + ["residual", "df_target", "lemma_arg_slack"]
            + vec("y") + vec("z") + ["projection_cert_slack"])


def write_trace_csv(trace, fh, dim):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header(dim))
    for r in trace:
        w.writerow([r.n, *map(_fmt, r.x), _fmt(r.residual), _fmt(r.df_target),
                    _fmt(r.lemma_arg_slack), *map(_fmt, r.y), *map(_fmt, r.z),
                    _fmt(r.projection_cert_slack)])


def read_trace_csv(fh):
    reader = csv.reader(fh)
    head = next(reader)
    dim = sum(1 for h in head if h.startswith("x_"))
    rows = []
    for rec in reader:
        vals = [float(v) for v in rec[1:]]
        x, rest = vals[:dim], vals[dim:]
        residual, df, slack = rest[:3]
        y, z = rest[3:3 + dim], rest[3 + dim:3 + 2 * dim]
        rows.append(TraceRow(int(rec[0]), np.array(x), np.array(y), np.array(z),
                             residual, df, slack, rest[3 + 2 * dim]))
    return rows


@dataclass
class RunArtifact:
    config_text: str
    trace: list
    solution: np.ndarray
    status: str
    wall_time: float

    def to_json(self):
        return json.dumps({
            "config": self.config_text,
            "iterations": len(self.trace),
            "solution": [float(v) for v in self.solution],
            "status": self.status,
            "wall_time": self.wall_time,
        }, indent=2)
