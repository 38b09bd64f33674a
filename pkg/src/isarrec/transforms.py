"""2-D DFT conventions, the S-method image and the sparsity measure.

Forward transform is the plain unnormalized double sum

    Q(k, l) = sum_m sum_n q(m, n) * exp(-j*(2*pi*m*k/M + 2*pi*n*l/N))

and the inverse carries the 1/(M*N) factor, matching numpy's fft2/ifft2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import check_complex_grid, check_mask


def dft2(grid) -> np.ndarray:
    """Unnormalized forward 2-D DFT of a complex grid."""
    return np.fft.fft2(check_complex_grid(grid))


def idft2(spectrum) -> np.ndarray:
    """Inverse 2-D DFT with the 1/(M*N) factor."""
    return np.fft.ifft2(check_complex_grid(spectrum, name="spectrum"))


def partial_dft2(grid, mask) -> np.ndarray:
    """DFT evaluated over the available samples only (missing treated as zero).

    For an on-bin component of amplitude sigma the value at its own bin is
    exactly sigma * N_A, independent of which N_A samples are available.
    """
    grid = check_complex_grid(grid)
    mask = check_mask(mask, grid.shape, min_available=0)
    return np.fft.fft2(np.where(mask, grid, 0.0))


def check_corrections(corrections: int, m_chirps: int) -> int:
    corrections = int(corrections)
    upper = max(0, m_chirps // 2 - 1)
    if corrections < 0 or corrections > upper:
        raise ValueError(
            f"corrections must lie in [0, {upper}] for {m_chirps} chirps")
    return corrections


def smethod(spectrum, corrections: int) -> np.ndarray:
    """S-method image from a complex spectrum, corrections along cross-range.

    SM_L(k, l) = |Q(k, l)|^2 + 2 * sum_{z=1..L} Re{Q(k+z, l) * conj(Q(k-z, l))}

    with circular indexing in k.  L = 0 gives the plain 2-D periodogram,
    L = M/2 - 1 reaches the pseudo-Wigner limit.  Output is real (it can go
    negative away from components).
    """
    spectrum = check_complex_grid(spectrum, name="spectrum")
    corrections = check_corrections(corrections, spectrum.shape[0])
    sm = np.abs(spectrum) ** 2
    for z in range(1, corrections + 1):
        sm += 2.0 * (np.roll(spectrum, -z, axis=0) * np.conj(np.roll(spectrum, z, axis=0))).real
    return sm


def smethod_increment(sm_prev, spectrum, corrections: int) -> np.ndarray:
    """One recursion step: SM_L from SM_{L-1} by adding the z = L term."""
    spectrum = check_complex_grid(spectrum, name="spectrum")
    z = check_corrections(corrections, spectrum.shape[0])
    if z < 1:
        raise ValueError("recursion step needs corrections >= 1")
    return sm_prev + 2.0 * (np.roll(spectrum, -z, axis=0) * np.conj(np.roll(spectrum, z, axis=0))).real


def half_norm(image) -> float:
    """Sparsity cost sum(|SM|^(1/2)); equals sum(|Q|) when applied to SM_0."""
    return float(np.sum(np.sqrt(np.abs(np.asarray(image)))))


@dataclass(frozen=True)
class SparsityMeasure:
    half_norm: float
    nonzero_count: int


def sparsity_measure(image, zero_threshold: float = 1e-3) -> SparsityMeasure:
    """Half-norm plus a diagnostic count of cells above a relative threshold.

    ``zero_threshold`` is relative to the image peak; the count is a
    concentration diagnostic, never an optimization objective.
    """
    image = np.asarray(image)
    if image.size == 0:
        raise ValueError("empty image")
    if zero_threshold < 0:
        raise ValueError("zero_threshold must be >= 0")
    mag = np.abs(image)
    peak = float(mag.max())
    count = int(np.count_nonzero(mag > zero_threshold * peak)) if peak > 0 else 0
    return SparsityMeasure(half_norm=half_norm(image), nonzero_count=count)
