import numpy as np
import pytest

from crosstheta.lattices import IntegerLattice


def random_hnf(rng, n: int, max_index: int) -> list[list[int]]:
    """Random full-rank HNF basis of a sublattice of Z^n with index <= max_index."""
    while True:
        diag = [int(d) for d in rng.integers(1, max_index + 1, size=n)]
        idx = int(np.prod(diag))
        if 1 <= idx <= max_index:
            break
    h = [[0] * n for _ in range(n)]
    for i in range(n):
        h[i][i] = diag[i]
        for j in range(i + 1, n):
            h[i][j] = int(rng.integers(0, diag[j]))
    return h


def scramble_unimodular(rng, rows: list[list[int]], steps: int = 12) -> list[list[int]]:
    m = [list(r) for r in rows]
    n = len(m)
    for _ in range(steps):
        op = rng.integers(0, 3)
        i, j = rng.choice(n, size=2, replace=False)
        if op == 0:
            c = int(rng.integers(-3, 4))
            m[i] = [a + c * b for a, b in zip(m[i], m[j])]
        elif op == 1:
            m[i], m[j] = m[j], m[i]
        else:
            m[i] = [-a for a in m[i]]
    return m


def random_sublattice(rng, n: int = 4, max_index: int = 32) -> IntegerLattice:
    return IntegerLattice(scramble_unimodular(rng, random_hnf(rng, n, max_index)))


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
