import numpy as np
import pytest
from hypothesis import settings

from schmidtnum import _accel

settings.register_profile("default", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("default")


@pytest.fixture(scope="session", autouse=True)
def _jit_warm():
    _accel.warmup()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Record a one-line verdict for an acceptance criterion."""
    key = request.node.name
    _CRITERIA[key] = [None, "FAIL", ""]

    def record(label, detail=""):
        _CRITERIA[key][0] = label
        _CRITERIA[key][2] = detail

    yield record
    rep = getattr(request.node, "rep_call", None)
    _CRITERIA[key][1] = "PASS" if rep is not None and rep.passed else "FAIL"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key, (label, verdict, detail) in _CRITERIA.items():
        terminalreporter.write_line(f"{verdict}  {label or key}  {detail}".rstrip())
