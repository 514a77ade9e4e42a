import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from pqc.jets import ScalarField

settings.register_profile("pqc", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("pqc")

# polynomial conformal factors used across the conformal tests
H_TERMS = {
    1: [
        [(1.0, "1"), (1.0, "t1^2")],
        [(3.0, "1"), (0.7, "t1*x1"), (-0.4, "y1^2"), (0.3, "x"), (0.5, "z*t1"), (0.2, "x1*y1*z1"), (0.3, "y^2")],
    ],
    2: [
        [(2.0, "1"), (1.0, "t1*x2"), (-0.5, "y1")],
        [
            (3.0, "1"), (0.6, "t2*y1"), (-0.3, "z2^2"), (0.25, "x2*t1*y"), (0.4, "x1*z"),
            (0.2, "y2*z1*t2"), (-0.3, "x^2"), (0.5, "t1^2*z2"),
        ],
    ],
}


def factor(n: int, k: int) -> ScalarField:
    return ScalarField.from_terms(n, H_TERMS[n][k])


def sample_points(h: ScalarField, count: int, seed: int, box: float = 0.5):
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < count:
        u = rng.uniform(-box, box, 4 * h.n + 3)
        if h(u) > 0.2:
            pts.append(u)
    return pts


@pytest.fixture(params=[(1, 0), (1, 1), (2, 0), (2, 1)], ids=lambda p: f"n{p[0]}-h{p[1]}")
def deformation_case(request):
    n, k = request.param
    return factor(n, k), sample_points(factor(n, k), 2, seed=10 * n + k)


_criteria = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" in report.nodeid and (report.when == "call" or report.failed):
        name = report.nodeid.split("::test_criterion_")[1]
        num, _, label = name.partition("_")
        if report.failed or num not in _criteria:
            _criteria[num] = ("FAIL" if report.failed else "PASS", label.replace("_", " "))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria, key=int):
        verdict, label = _criteria[num]
        terminalreporter.write_line(f"criterion {num}: {verdict}  {label}")
