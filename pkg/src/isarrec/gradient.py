"""Gradient-style recovery of missing samples via the S-method sparsity cost.

Missing cells start at zero and descend the half-norm of the S-method image.
The gradient estimate is a symmetric finite difference: each missing sample
is perturbed by +/-delta along the real and imaginary axes and the cost
difference is normalized by 2*M*N*delta.  All gradients within one sweep are
evaluated against the same snapshot, so cell order cannot matter.

Perturbing one sample q(m0, n0) by d shifts every spectrum bin by
d * exp(-j*(2*pi*m0*k/M + 2*pi*n0*l/N)); the perturbed S-method image then
follows in closed form from the unperturbed spectrum, which keeps a full
sweep at O(M*N*L) per cell without re-running any transform.  A reference
path that really re-runs the transforms backs this up in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from .transforms import check_corrections, half_norm, smethod
from .validation import check_complex_grid, check_mask, check_positive

_CHUNK = 256  # missing cells processed per vectorized block


@dataclass(frozen=True)
class GradientConfig:
    """Knobs for recover_gradient.

    corrections     S-method spread L used inside the cost
    delta_init      starting step; "auto" uses the largest available magnitude
    delta_shrink    step division factor applied on stall (default sqrt(10))
    stall_ratio     snapshot change ratio at or below which the current step
                    size is immediately considered exhausted
    tr_threshold    change ratio accepted as converged
    max_sweeps      hard sweep budget
    delta_min       floor for the step; shrinking past it stops the run
    inner_sweeps    sweeps between consecutive change-ratio snapshots
    shrink_on       "stall": run each step size until the cost stops improving
                    (or the change ratio hits stall_ratio), keep the best
                    iterate of that stretch, then shrink.  "precision": shrink
                    after every snapshot whose change ratio is still above
                    tr_threshold.
    """

    corrections: int = 0
    delta_init: float | str = "auto"
    delta_shrink: float = sqrt(10.0)
    stall_ratio: float = 0.01
    tr_threshold: float = 0.001
    max_sweeps: int = 1000
    delta_min: float = 1e-12
    inner_sweeps: int = 1
    shrink_on: str = "stall"

    def __post_init__(self):
        if self.corrections < 0:
            raise ValueError("corrections must be >= 0")
        if self.delta_init != "auto":
            check_positive(self.delta_init, "delta_init")
        if self.delta_shrink <= 1.0:
            raise ValueError("delta_shrink must be > 1")
        check_positive(self.stall_ratio, "stall_ratio")
        check_positive(self.tr_threshold, "tr_threshold")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        check_positive(self.delta_min, "delta_min")
        if self.inner_sweeps < 1:
            raise ValueError("inner_sweeps must be >= 1")
        if self.shrink_on not in ("stall", "precision"):
            raise ValueError("shrink_on must be 'stall' or 'precision'")


@dataclass
class GradientTrace:
    """One record per snapshot: step size, cost, and change ratio."""

    deltas: list = field(default_factory=list)
    half_norms: list = field(default_factory=list)
    t_ratios: list = field(default_factory=list)
    sweeps: int = 0
    final_delta: float = 0.0
    converged: bool = False


def _perturbed_norms(spec, sm_base, rolls, m_cells, n_cells, delta, corrections):
    """Half-norms of the S-method image after +/-delta pokes at given cells.

    Exact expansion: with P = delta*u*E the perturbed image is
        SM[Q + P] = SM[Q] + delta^2*w2 + 2*delta*Re{conj(u)*conj(E)*W}
    where E is the cell's spectrum signature, a = exp(-2j*pi*m0/M),
    W = Q + sum_z a^z*Q(.+z) + a^-z*Q(.-z)  and  w2 = 1 + 2*sum_z cos(4*pi*m0*z/M).
    Returns four arrays over cells: real+/-, imag+/- half-norms.
    """
    m_dim, n_dim = spec.shape
    a = np.exp(-2j * np.pi * m_cells / m_dim)
    w = np.broadcast_to(spec, (len(m_cells),) + spec.shape).copy()
    w2 = np.ones(len(m_cells))
    for z in range(1, corrections + 1):
        az = a ** z
        w += az[:, None, None] * rolls[z - 1][0][None] \
            + np.conj(az)[:, None, None] * rolls[z - 1][1][None]
        w2 += 2.0 * np.cos(4.0 * np.pi * m_cells * z / m_dim)
    em = np.exp(-2j * np.pi * np.outer(m_cells, np.arange(m_dim)) / m_dim)
    en = np.exp(-2j * np.pi * np.outer(n_cells, np.arange(n_dim)) / n_dim)
    t = np.conj(em[:, :, None] * en[:, None, :]) * w
    base = sm_base[None] + (delta * delta) * w2[:, None, None]
    re_term = (2.0 * delta) * t.real
    im_term = (2.0 * delta) * t.imag
    axes = (1, 2)
    return (np.sqrt(np.abs(base + re_term)).sum(axis=axes),
            np.sqrt(np.abs(base - re_term)).sum(axis=axes),
            np.sqrt(np.abs(base + im_term)).sum(axis=axes),
            np.sqrt(np.abs(base - im_term)).sum(axis=axes))


def _roll_stack(spec, corrections):
    return [(np.roll(spec, -z, axis=0), np.roll(spec, z, axis=0))
            for z in range(1, corrections + 1)]


def measure_differential(y, cell, delta: float, corrections: int = 0,
                         axis: str = "real", reference: bool = False) -> float:
    """Symmetric-difference slope of the S-method half-norm at one cell.

    ``reference=True`` evaluates both perturbed costs through full
    transforms instead of the closed-form update (oracle path).
    """
    y = check_complex_grid(y)
    check_positive(delta, "delta")
    corrections = check_corrections(corrections, y.shape[0])
    if axis not in ("real", "imag"):
        raise ValueError("axis must be 'real' or 'imag'")
    m0, n0 = int(cell[0]), int(cell[1])
    if not (0 <= m0 < y.shape[0] and 0 <= n0 < y.shape[1]):
        raise ValueError(f"cell {cell} outside grid {y.shape}")
    scale = 2.0 * y.size * delta
    if reference:
        poke = delta if axis == "real" else 1j * delta
        plus, minus = y.copy(), y.copy()
        plus[m0, n0] += poke
        minus[m0, n0] -= poke
        return (half_norm(smethod(np.fft.fft2(plus), corrections))
                - half_norm(smethod(np.fft.fft2(minus), corrections))) / scale
    spec = np.fft.fft2(y)
    sm = smethod(spec, corrections)
    rolls = _roll_stack(spec, corrections)
    cells_m = np.array([float(m0)])
    cells_n = np.array([float(n0)])
    rp, rm, ip, im = _perturbed_norms(spec, sm, rolls, cells_m, cells_n, delta, corrections)
    if axis == "real":
        return float(rp[0] - rm[0]) / scale
    return float(ip[0] - im[0]) / scale


def gradient_sweep(y, mask, delta: float, corrections: int = 0):
    """One Jacobi sweep over every missing cell.

    Returns (updated grid, complex gradient grid).  The gradient is zero at
    available cells and every estimate uses the sweep-start snapshot, so the
    result does not depend on cell ordering.  Available samples pass through
    bit-identical.
    """
    y = check_complex_grid(y)
    mask = check_mask(mask, y.shape)
    check_positive(delta, "delta")
    corrections = check_corrections(corrections, y.shape[0])
    grad = np.zeros_like(y)
    miss_m, miss_n = np.nonzero(~mask)
    if len(miss_m) == 0:
        return y.copy(), grad
    spec = np.fft.fft2(y)
    sm = smethod(spec, corrections)
    rolls = _roll_stack(spec, corrections)
    scale = 2.0 * y.size * delta
    for lo in range(0, len(miss_m), _CHUNK):
        sl = slice(lo, lo + _CHUNK)
        rp, rm, ip, im = _perturbed_norms(spec, sm, rolls,
                                          miss_m[sl].astype(float),
                                          miss_n[sl].astype(float),
                                          delta, corrections)
        grad[miss_m[sl], miss_n[sl]] = (rp - rm) / scale + 1j * (ip - im) / scale
    y_new = y.copy()
    y_new[~mask] -= 2.0 * delta * grad[~mask]
    return y_new, grad


def _change_ratio(before, after, missing) -> float:
    num = float(np.sum(np.abs(after[missing] - before[missing]) ** 2))
    den = float(np.sum(np.abs(after[missing]) ** 2))
    if num == 0.0:
        return 0.0
    return num / den if den > 0.0 else np.inf


# stall mode: snapshots without a new cost minimum before a step size is
# declared exhausted, and a hard snapshot cap per step size
_PATIENCE = 10
_LEVEL_CAP = 200


def recover_gradient(grid, mask, config: GradientConfig | None = None,
                     frame_callback=None):
    """Fill missing samples by adaptive-step descent of the S-method cost.

    The step starts large and is divided by ``delta_shrink`` as progress at
    its current size runs out; the run ends once the snapshot change ratio
    drops below ``tr_threshold`` (or the sweep budget or step floor is hit).
    In the default "stall" mode each step size keeps sweeping until the cost
    has not improved for a few snapshots, and the best iterate seen at that
    size is carried into the next one, so the cost never rises across step
    changes even when early large-step sweeps overshoot.  The "precision"
    mode shrinks after every snapshot still above the threshold, which
    quenches the step in a fixed number of sweeps.

    Returns (completed grid, GradientTrace).  Available samples are returned
    bit-identical to the input.
    """
    grid = check_complex_grid(grid)
    mask = check_mask(mask, grid.shape)
    cfg = config or GradientConfig()
    corrections = check_corrections(cfg.corrections, grid.shape[0])
    missing = ~mask
    y = np.where(mask, grid, 0.0)
    trace = GradientTrace()
    if not missing.any():
        trace.final_delta = 0.0
        trace.converged = True
        return y, trace

    if cfg.delta_init == "auto":
        delta = float(np.max(np.abs(grid[mask])))
        if delta <= 0.0:
            raise ValueError("auto delta_init undefined: all available samples are zero")
    else:
        delta = float(cfg.delta_init)

    cost = half_norm(smethod(np.fft.fft2(y), corrections))
    best_y, best_cost = y, cost        # best iterate at the current step size
    level_snapshots = 0
    since_improvement = 0
    sweeps = 0

    while sweeps < cfg.max_sweeps:
        before = y
        for _ in range(cfg.inner_sweeps):
            y, _g = gradient_sweep(y, mask, delta, corrections)
            sweeps += 1
            if frame_callback is not None:
                frame_callback(sweeps, y)
            if sweeps >= cfg.max_sweeps:
                break
        t_r = _change_ratio(before, y, missing)
        cost = half_norm(smethod(np.fft.fft2(y), corrections))
        trace.deltas.append(delta)
        trace.half_norms.append(cost)
        trace.t_ratios.append(t_r)
        if cfg.shrink_on == "precision":
            # literal reading: every snapshot either passes the precision
            # bar or forces a smaller step
            if t_r < cfg.tr_threshold:
                trace.converged = True
                break
            if sweeps >= cfg.max_sweeps:
                break
            delta /= cfg.delta_shrink
            if delta < cfg.delta_min:
                break
            continue

        level_snapshots += 1
        if cost < best_cost:
            best_y, best_cost = y, cost
            since_improvement = 0
        else:
            since_improvement += 1
        never_improved = since_improvement == level_snapshots
        stalled = (since_improvement >= _PATIENCE
                   or level_snapshots >= _LEVEL_CAP
                   or (never_improved and level_snapshots >= 2
                       and t_r <= cfg.stall_ratio))
        if not stalled:
            if sweeps >= cfg.max_sweeps:
                break
            continue
        # step size exhausted: keep its best iterate, then either declare
        # convergence (movement already below threshold) or shrink
        if best_cost < cost:
            y, cost = best_y, best_cost
        if t_r < cfg.tr_threshold:
            trace.converged = True
            break
        if sweeps >= cfg.max_sweeps:
            break
        delta /= cfg.delta_shrink
        if delta < cfg.delta_min:
            break
        best_y, best_cost = y, cost
        level_snapshots = 0
        since_improvement = 0
    trace.sweeps = sweeps
    trace.final_delta = delta
    return y, trace
