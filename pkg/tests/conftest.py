import numpy as np
import pytest

from kdtransition.linalg import random_basis, random_density, random_observable

ACCEPTANCE_LINES: list[str] = []


def random_instance(d, rng, pure=False):
    """Random (rho, A, F) triple with a Haar-random F basis."""
    rho = random_density(d, rng, rank=1 if pure else None)
    return rho, random_observable(d, rng), random_basis(d, rng)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


@pytest.fixture
def record_acceptance():
    def record(criterion: str, passed: bool, detail: str = ""):
        line = f"[{'PASS' if passed else 'FAIL'}] {criterion}" + (f" :: {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
