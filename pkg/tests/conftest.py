import pytest

from chirprip import numtheory as nt

SEED = 0xB0D1


@pytest.fixture
def ctx13():
    return nt.PrimeContext(13)


@pytest.fixture
def ctx7():
    return nt.PrimeContext(7)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
