import pytest

from icsrs.fiber import FiberLink
from icsrs.qkd import QuantumReceiver

ETA = 6e-9  # (km nm)^-1


@pytest.fixture
def fig4_link():
    """0.22 / 0.21 dB/km, h = 1e-6 m^-1, 50 km."""
    return FiberLink.from_engineering(50.0, 0.22, 0.21, 1e-6)


@pytest.fixture
def receiver():
    return QuantumReceiver()


acceptance_key = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record one acceptance verdict; the summary prints a line per criterion."""
    results = request.config.stash.setdefault(acceptance_key, {})

    def record(number, ok, detail):
        results[number] = (bool(ok), detail)
        assert ok, f"criterion {number}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(acceptance_key, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, detail = results[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
