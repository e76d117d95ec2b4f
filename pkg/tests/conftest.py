import pytest
from hypothesis import settings

from utamp.bench import SCENARIOS, run_bench

settings.register_profile("default", deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def bench_report():
    """One run of every built-in scenario, shared across test modules."""
    return run_bench([f() for f in SCENARIOS.values()])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
