"""Direct least-squares recovery of sparse spectra from incomplete grids.

Pipeline: partial DFT over the available samples, keep the strongest K_hat
bins as the support, then solve the normal equations for the exact spectrum
values on that support.  The basis matrix is never materialized: both the
Gram matrix and the right-hand side come from FFTs of the mask and of the
zero-filled grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .transforms import partial_dft2
from .validation import check_complex_grid, check_mask


class SingularSystemError(Exception):
    """Raised when the normal equations are numerically singular."""

    def __init__(self, message, rcond=None, support=None):
        super().__init__(message)
        self.rcond = rcond
        self.support = support


@dataclass
class RecoveryReport:
    spectrum: np.ndarray              # full-size, zero off support
    grid: np.ndarray                  # inverse DFT of the spectrum
    support: np.ndarray               # (K_hat, 2) int bin indices
    residual_available: float         # max |recovered - given| on available cells
    iterations: int
    condition_ok: bool
    counts: dict = field(default_factory=dict)


def select_support(spectrum, k_hat: int) -> np.ndarray:
    """Indices of the k_hat largest-magnitude bins, ties broken by (k, l)."""
    spectrum = check_complex_grid(spectrum, name="spectrum")
    k_hat = int(k_hat)
    if k_hat < 1 or k_hat > spectrum.size:
        raise ValueError(f"k_hat must lie in [1, {spectrum.size}]")
    mag = np.abs(spectrum).ravel()
    # stable sort on descending magnitude keeps flat (k*N + l) order for ties
    order = np.argsort(-mag, kind="stable")[:k_hat]
    return np.column_stack(np.unravel_index(order, spectrum.shape)).astype(np.intp)


def _check_support(support, shape) -> np.ndarray:
    sup = np.asarray(support, dtype=np.intp)
    if sup.ndim != 2 or sup.shape[1] != 2 or sup.shape[0] < 1:
        raise ValueError("support must be a (K, 2) index array")
    m, n = shape
    if (sup[:, 0] < 0).any() or (sup[:, 0] >= m).any() or (sup[:, 1] < 0).any() or (sup[:, 1] >= n).any():
        raise ValueError("support indices out of range")
    flat = sup[:, 0] * n + sup[:, 1]
    if len(np.unique(flat)) != len(flat):
        raise ValueError("support positions must be distinct")
    return sup


def solve_ls(grid, mask, support, rcond_threshold: float = 1e-10) -> np.ndarray:
    """Least-squares spectrum on a fixed support from the available samples.

    Minimizes the mismatch between the observed samples and the inverse DFT
    restricted to the support.  Solved through the normal equations; the Gram
    matrix entries are read off the mask spectrum at index differences.
    Raises SingularSystemError when the reciprocal condition number of the
    Gram matrix falls below ``rcond_threshold``.
    """
    grid = check_complex_grid(grid)
    mask = check_mask(mask, grid.shape)
    sup = _check_support(support, grid.shape)
    m_dim, n_dim = grid.shape
    total = m_dim * n_dim
    n_avail = int(mask.sum())
    if sup.shape[0] > n_avail:
        raise ValueError(f"support size {sup.shape[0]} exceeds available count {n_avail}")

    mask_spec = np.fft.fft2(mask.astype(np.complex128))
    dk = (sup[:, 0, None] - sup[None, :, 0]) % m_dim
    dl = (sup[:, 1, None] - sup[None, :, 1]) % n_dim
    gram = mask_spec[dk, dl] / float(total) ** 2
    rhs = partial_dft2(grid, mask)[sup[:, 0], sup[:, 1]] / float(total)

    u, s, vh = np.linalg.svd(gram)
    rcond = float(s[-1] / s[0]) if s[0] > 0 else 0.0
    if not np.isfinite(rcond) or rcond < rcond_threshold:
        raise SingularSystemError(
            f"normal equations singular: rcond={rcond:.3e} < {rcond_threshold:.1e}",
            rcond=rcond, support=sup)
    coef = vh.conj().T @ ((u.conj().T @ rhs) / s)

    spectrum = np.zeros(grid.shape, dtype=np.complex128)
    spectrum[sup[:, 0], sup[:, 1]] = coef
    return spectrum


def _finish(grid, mask, spectrum, support, iterations, counts) -> RecoveryReport:
    rec = np.fft.ifft2(spectrum)
    resid = float(np.max(np.abs(rec - grid)[mask])) if mask.any() else 0.0
    return RecoveryReport(spectrum=spectrum, grid=rec, support=np.asarray(support, dtype=np.intp),
                          residual_available=resid, iterations=iterations,
                          condition_ok=True, counts=counts)


def recover_direct(grid, mask, k_hat: int | None = None,
                   rcond_threshold: float = 1e-10) -> RecoveryReport:
    """One-shot recovery: support from the partial DFT, values from LS.

    ``k_hat`` defaults to the available-sample count N_A, the conservative
    choice when the true sparsity is unknown.
    """
    grid = check_complex_grid(grid)
    mask = check_mask(mask, grid.shape)
    n_avail = int(mask.sum())
    if k_hat is None:
        k_hat = n_avail
    k_hat = int(k_hat)
    if not 1 <= k_hat <= n_avail:
        raise ValueError(f"k_hat must lie in [1, N_A={n_avail}]")
    support = select_support(partial_dft2(grid, mask), k_hat)
    spectrum = solve_ls(grid, mask, support, rcond_threshold)
    return _finish(grid, mask, spectrum, support, 1, {"ls_solves": 1})


def recover_iterative(grid, mask, max_components: int | None = None,
                      tol: float | None = None,
                      rcond_threshold: float = 1e-10) -> RecoveryReport:
    """Recovery by repeated strongest-bin detection and LS re-solve.

    Each round takes the largest bin of the residual's partial DFT, appends
    it to the support, re-solves the full LS system, and subtracts the
    reconstruction.  Stops once the worst mismatch on available samples
    drops below ``tol`` (default 1e-6 of the largest available magnitude)
    or ``max_components`` bins have been taken.
    """
    grid = check_complex_grid(grid)
    mask = check_mask(mask, grid.shape)
    n_avail = int(mask.sum())
    if max_components is None:
        max_components = n_avail
    max_components = int(max_components)
    if not 1 <= max_components <= n_avail:
        raise ValueError(f"max_components must lie in [1, N_A={n_avail}]")
    peak = float(np.max(np.abs(grid)[mask]))
    if tol is None:
        tol = 1e-6 * peak
    if peak == 0.0:
        # nothing observed: empty reconstruction is already exact
        z = np.zeros_like(grid)
        return RecoveryReport(z, z.copy(), np.empty((0, 2), dtype=np.intp), 0.0, 0, True, {"ls_solves": 0})

    observed = np.where(mask, grid, 0.0)
    residual = observed.copy()
    taken: list[tuple[int, int]] = []
    spectrum = np.zeros_like(grid)
    solves = 0
    for it in range(1, max_components + 1):
        bin_kl = select_support(np.fft.fft2(residual), 1)[0]
        if tuple(bin_kl) in taken:
            break  # residual peak already in support: no further progress possible
        taken.append((int(bin_kl[0]), int(bin_kl[1])))
        spectrum = solve_ls(grid, mask, np.array(taken), rcond_threshold)
        solves += 1
        recon = np.fft.ifft2(spectrum)
        residual = np.where(mask, grid - recon, 0.0)
        if float(np.max(np.abs(residual))) < tol:
            break
    report = _finish(grid, mask, spectrum, np.array(taken), len(taken), {"ls_solves": solves})
    return report
