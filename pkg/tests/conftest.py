import numpy as np
import pytest

from discordlab.states import make_rng, random_density

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record_criterion():
    def record(number: int, passed: bool, detail: str) -> None:
        ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_states(count, dims, seed, full_rank=False):
    rng = make_rng(seed)
    dim = dims[0] * dims[1]
    for _ in range(count):
        rank = dim if full_rank else int(rng.integers(1, dim + 1))
        yield random_density(dim, rank, rng, dims)


def random_hermitian(dim, rng):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2


def np_spectrum(mat):
    """Independent reference: LAPACK eigenvalues, descending."""
    return np.sort(np.linalg.eigvalsh(np.asarray(mat)))[::-1]
