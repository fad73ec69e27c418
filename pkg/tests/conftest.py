import numpy as np
import pytest

from binmatroid import _backend

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


@pytest.fixture(params=sorted(_backend.available()))
def kernels(request, monkeypatch):
    """Run a test once per available kernel backend."""
    impl = _backend.available()[request.param]
    monkeypatch.setattr(_backend, "kernels", impl)
    return impl


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
