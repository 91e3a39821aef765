import numpy as np
import pytest

# criterion label -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record(label, passed, detail=""):
    ACCEPTANCE[label] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE, key=lambda s: int(s.split()[0].rstrip("."))):
        passed, detail = ACCEPTANCE[label]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
