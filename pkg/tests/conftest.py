import json
import sys
from pathlib import Path

import numpy as np
import pytest

from bregman_ep import LegendreSpec

DATA = Path(__file__).parent / "data"
CONFIGS = Path(__file__).parent.parent / "configs"


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def sq1():
    return LegendreSpec.squared_norm(1)


@pytest.fixture(params=["squared-norm", "negative-entropy"])
def spec3(request):
    if request.param == "squared-norm":
        return LegendreSpec.squared_norm(3)
    return LegendreSpec.negative_entropy(3)


@pytest.fixture(scope="session")
def golden():
    return json.loads((DATA / "paper_example_golden.json").read_text())


@pytest.fixture
def configs():
    return CONFIGS


def random_point(spec, rng, lo=0.05, hi=4.0):
    if spec.kind.value == "negative-entropy":
        return rng.uniform(lo, hi, spec.dim)
    return rng.uniform(-hi, hi, spec.dim)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for num in sorted(lines):
            terminalreporter.write_line(lines[num])
