import pytest

from quenchlab import Domain, Grid


@pytest.fixture
def unit_interval():
    return Grid(Domain.interval(0.0, 1.0), 64)


@pytest.fixture
def disc():
    return Grid(Domain.ball(1.0, 2), 64)



def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: end-to-end acceptance criteria (slow)")


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = next((m for n, m in sys.modules.items() if n.endswith("test_acceptance")), None)
    results = getattr(mod, "RESULTS", [])
    if results:
        terminalreporter.section("acceptance criteria")
        for res in results:
            terminalreporter.write_line(res.line())
