import pytest

from fareycorr import build_sieve

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def tables():
    return build_sieve(20_000)


@pytest.fixture(scope="session")
def big_tables():
    return build_sieve(100_000)


@pytest.fixture
def report():
    """Record one acceptance line; all lines are repeated in the terminal summary."""

    def _report(criterion: int, passed: bool, detail: str) -> None:
        line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
