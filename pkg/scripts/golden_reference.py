"""Exact reference trajectory for the 1D worked example.

Composes the scalar closed forms with rational arithmetic so the package's
floating-point solver can be pinned against it. Shares no code with the
package on purpose.

    python scripts/golden_reference.py > tests/data/paper_example_golden.json
"""
import json
import sys
from fractions import Fraction as F

LO, HI = F(0), F(2)
LAM = F(1, 32)


def clamp(t):
    return min(max(t, LO), HI)


def schedule(n):
    a1 = F(1, 4 * n)
    rest = (1 - a1) / 3
    beta = F(1, 2) + F(1, n + 2)
    return (a1, rest, rest, rest), beta, F(1, 2), (F(1, 3),) * 3


def iterate(x, anchor, n):
    alpha, beta, delta, gamma = schedule(n)
    # g(a, y) = 16 y^2 + 9 a y - 25 a^2, f = y^2 / 2, so the prox minimiser of
    # lam * g(a, .) + (. - x)^2 / 2 solves (1 + 32 lam) y = x - 9 lam a.
    y = clamp((x - 9 * LAM * x) / (1 + 32 * LAM))
    z = clamp((x - 9 * LAM * y) / (1 + 32 * LAM))
    v = delta * clamp(x) + (1 - delta) * clamp(z)
    w = gamma[0] * v + gamma[1] * z + gamma[2] * z / 3
    u = clamp(w)
    k = beta * w + (1 - beta) * w / 3
    h = alpha[0] * anchor + alpha[1] * x + alpha[2] * u + alpha[3] * k
    return dict(y=y, z=z, v=v, w=w, u=u, k=k, h=h, x_next=clamp(h))


def main(argv):
    x, anchor = F(5), F(1)
    checkpoints = {1, 2, 10, 100, 1000}
    out = {"x1": 5.0, "anchor": 1.0, "lambda": float(LAM), "iterates": {}, "first_step": {}}
    for n in range(1, max(checkpoints) + 1):
        stage = iterate(x, anchor, n)
        if n == 1:
            out["first_step"] = {k: [repr(float(v)), str(v)] for k, v in stage.items()}
        if n in checkpoints:
            out["iterates"][str(n)] = repr(float(x))
        x = stage["x_next"]
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main(sys.argv[1:])
