import pytest

from randprod.primes import build_lambda_table


@pytest.fixture(scope="session")
def table_small():
    return build_lambda_table(10**5)


@pytest.fixture(scope="session")
def table():
    return build_lambda_table(10**6)


@pytest.fixture(scope="session")
def table_big():
    return build_lambda_table(10**7)


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(label, ok, detail=""):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())
        print(ACCEPTANCE_LINES[-1])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
