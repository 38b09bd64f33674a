"""File exports: complex grids as CSV, images as PGM, reports as JSON.

All writers are deterministic: identical inputs give identical bytes, so a
rerun of the same scenario can be diffed file by file.
"""

from __future__ import annotations

import json
from dataclasses import asdict

import numpy as np

from .validation import check_complex_grid


def save_grid_csv(path, grid, allow_nan: bool = False) -> None:
    """Row-major CSV, each cell as a re,im pair (2N columns per row).

    ``allow_nan`` permits NaN-marked missing cells (written literally as nan).
    """
    grid = check_complex_grid(grid, allow_nan=allow_nan)
    inter = np.empty((grid.shape[0], 2 * grid.shape[1]))
    inter[:, 0::2] = grid.real
    inter[:, 1::2] = grid.imag
    with open(path, "w", newline="") as fh:
        for row in inter:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def load_grid_csv(path) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    if data.shape[1] % 2:
        raise ValueError("grid CSV must hold re,im pairs")
    return (data[:, 0::2] + 1j * data[:, 1::2]).astype(np.complex128)


def save_pgm(path, image, gamma: float = 0.5) -> None:
    """8-bit binary PGM of |image|, max-normalized with gamma compression."""
    mag = np.abs(np.asarray(image)).astype(float)
    if mag.ndim != 2:
        raise ValueError("image must be 2-D")
    peak = mag.max()
    scaled = (mag / peak) ** gamma if peak > 0 else np.zeros_like(mag)
    pix = np.round(255.0 * scaled).astype(np.uint8)
    header = f"P5\n{pix.shape[1]} {pix.shape[0]}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header + pix.tobytes())


def write_json(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def report_to_dict(report) -> dict:
    """JSON-ready summary of a RecoveryReport (grids travel as CSV, not here).

    "timings" carries deterministic work counters so reruns stay
    byte-identical; wall-clock time is deliberately excluded.
    """
    return {
        "support": [[int(k), int(l)] for k, l in report.support],
        "residual_available": float(report.residual_available),
        "iterations": int(report.iterations),
        "condition_ok": bool(report.condition_ok),
        "timings": {k: int(v) for k, v in sorted(report.counts.items())},
    }


def trace_to_dict(trace) -> dict:
    return {
        "sweeps": int(trace.sweeps),
        "final_delta": float(trace.final_delta),
        "converged": bool(trace.converged),
        "snapshots": [
            {"delta": float(d), "half_norm": float(h), "t_ratio": float(t)}
            for d, h, t in zip(trace.deltas, trace.half_norms, trace.t_ratios)
        ],
    }


def snr_report_to_dict(report) -> dict:
    d = asdict(report)
    d["per_trial_db"] = [float(v) for v in d["per_trial_db"]]
    return d
