import numpy as np
import pytest

from mrbctl.rigid_body import body_from_eigenvalues

_ACCEPTANCE: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def body123():
    return body_from_eigenvalues([1.0, 2.0, 3.0])


@pytest.fixture
def body1234():
    return body_from_eigenvalues([1.0, 2.0, 3.0, 4.0])


@pytest.fixture
def acceptance_log():
    """Collects one PASS/FAIL line per acceptance criterion."""

    def log(criterion: str, ok: bool, detail: str) -> bool:
        _ACCEPTANCE.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
        print(_ACCEPTANCE[-1])
        return ok

    return log


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
