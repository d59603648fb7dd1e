import pytest

from rcatenoid.family import make_family


@pytest.fixture(scope="session")
def fam41():
    return make_family(4, 1)


@pytest.fixture(scope="session")
def fam31():
    return make_family(3, 1)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
