import numpy as np
import pytest
from hypothesis import settings

from vtolnav.sim import disturbance_free_baseline, paper_baseline, run

# First calls trigger numba compilation; wall-clock deadlines are meaningless.
settings.register_profile("vtolnav", deadline=None)
settings.load_profile("vtolnav")

_ACCEPTANCE = []


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def clean_log():
    """Baseline with wind, sensor noise and gyro bias all removed."""
    return run(disturbance_free_baseline())


@pytest.fixture(scope="session")
def full_log():
    return run(paper_baseline())


@pytest.fixture(scope="session")
def acceptance_record():
    def record(number, title, ok, detail=""):
        _ACCEPTANCE.append((number, title, bool(ok), detail))
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:>2}. {title}: {detail}")
