import pytest

from orbizeta.groups import builtin_orbifold_0_1_222, builtin_punctured_torus

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def torus():
    return builtin_punctured_torus()


@pytest.fixture(scope="session")
def orbifold():
    return builtin_orbifold_0_1_222()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
