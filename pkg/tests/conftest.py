import numpy as np
import pytest


@pytest.fixture
def random_unimodular():
    """Factory for seeded integer matrices of determinant ±1 built from row operations."""

    def build(rank: int, seed: int, steps: int = 12):
        rng = np.random.default_rng(seed)
        U = np.eye(rank, dtype=np.int64)
        if rank < 2:
            return [[-1]] if rng.integers(2) else [[1]]
        for _ in range(steps):
            i, j = rng.choice(rank, size=2, replace=False)
            U[i] += int(rng.choice([-1, 1])) * U[j]
            if rng.integers(4) == 0:
                U[[i, j]] = U[[j, i]]
        return [[int(x) for x in row] for row in U]

    return build
