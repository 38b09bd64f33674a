"""Input checking helpers shared by the library and the estimator wrappers."""

from __future__ import annotations

import numpy as np


def check_complex_grid(x, name: str = "grid", allow_nan: bool = False) -> np.ndarray:
    """Coerce ``x`` to a 2-D complex128 array and verify its values.

    With ``allow_nan`` the array may carry NaN cells (missing samples);
    infinities are always rejected.
    """
    arr = np.asarray(x)
    if arr.ndim == 1:
        # a bare slow-time sequence is treated as an (M, 1) grid
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    arr = np.ascontiguousarray(arr, dtype=np.complex128)
    finite = np.isfinite(arr.real) & np.isfinite(arr.imag)
    if allow_nan:
        nan = np.isnan(arr.real) | np.isnan(arr.imag)
        if not np.all(finite | nan):
            raise ValueError(f"{name} contains infinities")
    elif not np.all(finite):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_mask(mask, shape: tuple[int, int], min_available: int = 1) -> np.ndarray:
    """Validate an availability mask against a grid shape."""
    m = np.asarray(mask)
    if m.shape != tuple(shape):
        raise ValueError(f"mask shape {m.shape} does not match grid shape {tuple(shape)}")
    if m.dtype != np.bool_:
        if not np.isin(m, (0, 1)).all():
            raise ValueError("mask must be boolean")
        m = m.astype(bool)
    if int(m.sum()) < min_available:
        raise ValueError(f"mask must flag at least {min_available} available sample(s)")
    return m


def split_observed(x) -> tuple[np.ndarray, np.ndarray]:
    """Split a NaN-marked grid into (zero-filled grid, availability mask).

    A cell counts as missing when its real or imaginary part is NaN.
    """
    arr = check_complex_grid(x, allow_nan=True)
    missing = np.isnan(arr.real) | np.isnan(arr.imag)
    filled = arr.copy()
    filled[missing] = 0.0
    return filled, ~missing


def check_positive(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be positive and finite, got {value}")
    return value
