import numpy as np
import pytest
from scipy.stats import unitary_group

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def haar():
    """Seeded Haar-random unitaries of a given dimension."""
    rng = np.random.default_rng(20190222)

    def draw(dim: int) -> np.ndarray:
        return unitary_group.rvs(dim, random_state=rng)

    return draw


@pytest.fixture
def acceptance():
    """Record one acceptance criterion outcome for the end-of-run summary."""

    def record(name: str, ok: bool, detail: str = "") -> None:
        ACCEPTANCE_RESULTS.append((name, bool(ok), detail))
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
