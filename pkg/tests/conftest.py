import numpy as np
import pytest
from hypothesis import settings

from sphere_extremal.functionals import ModelParams
from sphere_extremal.spharm import SpectralField, build_basis, degree_arrays, n_coeffs

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

ACCEPTANCE = {
    "A1": "closed-form multipliers and branch energies",
    "A2": "Euler-Lagrange residual and bifurcation kernels",
    "A3": "oracle ascent reaches the pro-rotating maximiser",
    "A4": "Hessian sign patterns at w_min",
    "A5": "regime threshold sweep and spin threshold",
    "A6": "BVE conservation of H, total enstrophy, angular momentum",
    "A7": "Lyapunov probe of Q1+Q2",
    "A8": "figure curves satisfy their defining equations",
    "A9": "intermediate-regime w_min probe (informational)",
}
_outcomes = {}


def random_field(L, seed, l_max=None, scale=1.0):
    """Band-limited field with unit-order coefficients up to ``l_max``."""
    rng = np.random.default_rng(seed)
    ls, _ = degree_arrays(L)
    c = rng.standard_normal(n_coeffs(L)) * scale
    if l_max is not None:
        c[ls > l_max] = 0.0
    return SpectralField(L, c)


@pytest.fixture(scope="session")
def tables21():
    return build_basis(21)


@pytest.fixture
def unit_params():
    return ModelParams(1.0, 1.0)


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance" in report.nodeid and name.startswith("test_A"):
        key = name[5:7]
        # parametrised criteria pass only if every case passes
        if _outcomes.get(key) != "failed":
            _outcomes[key] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for key, desc in ACCEPTANCE.items():
        if key not in _outcomes:
            continue
        status = "PASS" if _outcomes[key] == "passed" else "FAIL"
        if key == "A9" and status == "PASS":
            status = "INFO"
        terminalreporter.write_line(f"{key} {status}  {desc}")
