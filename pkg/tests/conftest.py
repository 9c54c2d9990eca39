import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from manistab.geometry import sample_manifold  # noqa: E402
from manistab.graph import build_graph, laplacian  # noqa: E402
from manistab.spectral import eigendecompose  # noqa: E402

PRESETS = Path(__file__).resolve().parents[1] / "presets"


@pytest.fixture(scope="session")
def sphere60():
    """The preset 60-point sphere graph: seed 3 splits at alpha = 0.02 into {0}, {1..3}, rest."""
    cloud = sample_manifold("sphere2", 60, 3)
    op = laplacian(build_graph(cloud))
    return cloud, op, eigendecompose(op)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one PASS/FAIL line per acceptance criterion at the end of the run
_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_ac" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda s: int(s.split("_")[1][2:])):
        label = name.split("_")[1].upper()
        verdict = "PASS" if _ACCEPTANCE[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"{label:5s} {verdict}  {name}")
