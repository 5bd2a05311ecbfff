import math

import pytest

from spikegate.device import REFERENCE_PARAMS
from spikegate.instrument import simulated_port

KAPPA = 2.0e-7
G_DC = 1.0e-7
ONE_STEP_MEMORY = 1.0 - math.exp(-1.0)  # 0.02 s / 0.02 s
ONE_STEP_DECAY = math.exp(-20.0 / 7.0)  # 0.02 s / 0.007 s


def oracle_read(v1, v2):
    """Read current for 0 V -> v1 -> v2 from rest, one step apart, noise-free.

    Written out by hand from the update rules with the reference constants,
    independent of the package code.
    """
    s1 = KAPPA * v1 if v1 != 0.0 else 0.0
    u = v1 * ONE_STEP_MEMORY
    if v2 != v1:
        s2 = KAPPA * (v2 - u)
    else:
        s2 = s1 * ONE_STEP_DECAY
    return G_DC * v2 + s2


# frozen from oracle_read, in amperes
OR_READS = {(0, 0): 1.1148652385352348e-09, (0, 1): 5.8735758882342885e-08, (1, 0): -2.2284822353142306e-08, (1, 1): 2.2297304770704693e-08}
XOR_READS = {(0, 0): -1.1148652385352346e-08, (0, 1): 4.264241117657115e-08, (1, 0): -4.264241117657115e-08, (1, 1): 1.1148652385352346e-08}


@pytest.fixture
def quiet():
    return REFERENCE_PARAMS.noiseless()


@pytest.fixture
def quiet_port(quiet):
    return simulated_port(quiet, seed=0)


_ACCEPTANCE = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): exit criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is not None and (rep.when == "call" or rep.failed):
        _ACCEPTANCE.append((mark.args, rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), outcome in sorted(_ACCEPTANCE, key=lambda r: r[0][0]):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if outcome == 'passed' else 'FAIL'}  {title}")
