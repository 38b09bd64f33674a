import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def brute_dft2(grid):
    """Reference double-sum DFT, O((MN)^2). Keep grids tiny."""
    grid = np.asarray(grid, dtype=complex)
    M, N = grid.shape
    out = np.zeros((M, N), dtype=complex)
    for k in range(M):
        for l in range(N):
            acc = 0.0 + 0.0j
            for m in range(M):
                for n in range(N):
                    acc += grid[m, n] * np.exp(-2j * np.pi * (k * m / M + l * n / N))
            out[k, l] = acc
    return out


def brute_partial_dft2(grid, mask):
    grid = np.asarray(grid, dtype=complex)
    M, N = grid.shape
    out = np.zeros((M, N), dtype=complex)
    for k in range(M):
        for l in range(N):
            acc = 0.0 + 0.0j
            for m in range(M):
                for n in range(N):
                    if mask[m, n]:
                        acc += grid[m, n] * np.exp(
                            -2j * np.pi * (k * m / M + l * n / N)
                        )
            out[k, l] = acc
    return out
