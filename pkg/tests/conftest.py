import numpy as np
import pytest

from secantproj.sap import ProjectionBasis


def random_basis(rng, n, m):
    Q, _ = np.linalg.qr(rng.standard_normal((n, m)))
    return ProjectionBasis(Q)


def random_unit_columns(rng, n, p):
    S = rng.standard_normal((n, p))
    return S / np.linalg.norm(S, axis=0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE = []


def record(criterion, passed, detail):
    """Log one acceptance line, then fail the calling test if it did not pass."""
    ACCEPTANCE.append((criterion, bool(passed), detail))
    assert passed, f"criterion {criterion}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
