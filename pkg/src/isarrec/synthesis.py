"""Point-scatterer radar return synthesis, availability masks and noise.

The data model is an M x N complex grid: M chirps (slow time, index m) by
N samples per chirp (fast time, index n).  Each point scatterer contributes

    sigma * exp(j*2*pi*beta*m/M) * exp(j*alpha*m**2/2) * exp(j*2*pi*gamma*n/N)

so the 2-D DFT of a uniform target (alpha = 0) with integer bins is exactly
sparse: one bin per scatterer with value sigma*M*N.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .validation import check_complex_grid, check_positive

C_LIGHT = 299_792_458.0  # m/s


@dataclass(frozen=True)
class Scatterer:
    """One point reflector expressed in DFT-bin coordinates.

    amplitude   reflection strength sigma (> 0)
    cross_bin   Doppler position beta, in slow-time DFT bins (may be fractional)
    range_bin   position gamma, in fast-time DFT bins
    chirp_rate  slow-time quadratic phase rate alpha, rad per squared index
    """

    amplitude: float
    cross_bin: float
    range_bin: float = 0.0
    chirp_rate: float = 0.0

    def __post_init__(self):
        check_positive(self.amplitude, "amplitude")
        for name in ("cross_bin", "range_bin", "chirp_rate"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


def _slow_index(m_chirps: int, indexing: str) -> np.ndarray:
    if indexing == "zero":
        return np.arange(m_chirps, dtype=float)
    if indexing == "symmetric":
        if m_chirps % 2:
            raise ValueError("symmetric indexing needs an even chirp count")
        return np.arange(-m_chirps // 2, m_chirps // 2, dtype=float)
    raise ValueError(f"indexing must be 'zero' or 'symmetric', got {indexing!r}")


def _check_dims(m_chirps: int, n_samples: int) -> tuple[int, int]:
    m, n = int(m_chirps), int(n_samples)
    if m < 1 or n < 1:
        raise ValueError("grid dimensions must be at least 1")
    return m, n


def synthesize_nonuniform(scatterers, m_chirps: int, n_samples: int,
                          indexing: str = "zero") -> np.ndarray:
    """Sum of point responses with optional slow-time quadratic phase.

    ``indexing`` selects the slow-time index origin: "zero" runs m over
    0..M-1, "symmetric" over -M/2..M/2-1 (stored in ascending order).  The
    choice matters only when a chirp_rate is nonzero.
    """
    m_chirps, n_samples = _check_dims(m_chirps, n_samples)
    scatterers = list(scatterers)
    if not scatterers:
        raise ValueError("need at least one scatterer")
    m = _slow_index(m_chirps, indexing)
    n = np.arange(n_samples, dtype=float)
    grid = np.zeros((m_chirps, n_samples), dtype=np.complex128)
    for s in scatterers:
        if not isinstance(s, Scatterer):
            s = Scatterer(*s)
        slow = np.exp(2j * np.pi * s.cross_bin * m / m_chirps
                      + 0.5j * s.chirp_rate * m * m)
        fast = np.exp(2j * np.pi * s.range_bin * n / n_samples)
        grid += s.amplitude * np.outer(slow, fast)
    return grid


def synthesize_uniform(scatterers, m_chirps: int, n_samples: int) -> np.ndarray:
    """Uniformly rotating target: every chirp_rate must be zero."""
    scatterers = [s if isinstance(s, Scatterer) else Scatterer(*s) for s in scatterers]
    if any(s.chirp_rate != 0.0 for s in scatterers):
        raise ValueError("uniform synthesis requires zero chirp_rate; "
                         "use synthesize_nonuniform")
    return synthesize_nonuniform(scatterers, m_chirps, n_samples)


@dataclass(frozen=True)
class RadarParams:
    """Acquisition geometry for a stepped CPI of M chirps by N samples."""

    carrier_hz: float
    bandwidth_hz: float
    integration_s: float       # coherent integration time T_c
    chirps: int                # M
    samples_per_chirp: int     # N

    def __post_init__(self):
        check_positive(self.carrier_hz, "carrier_hz")
        check_positive(self.bandwidth_hz, "bandwidth_hz")
        check_positive(self.integration_s, "integration_s")
        for name in ("chirps", "samples_per_chirp"):
            v = getattr(self, name)
            if v < 4 or (v & (v - 1)):
                raise ValueError(f"{name} must be a power of two >= 4, got {v}")

    @property
    def omega0(self) -> float:
        return 2.0 * np.pi * self.carrier_hz

    @property
    def chirp_interval(self) -> float:
        """Chirp repetition interval T_r = T_c / M."""
        return self.integration_s / self.chirps

    @property
    def sample_interval(self) -> float:
        return self.chirp_interval / self.samples_per_chirp

    @property
    def range_resolution(self) -> float:
        return C_LIGHT / (2.0 * self.bandwidth_hz)

    def cross_range_resolution(self, rotation_rate: float) -> float:
        check_positive(rotation_rate, "rotation_rate")
        return np.pi * C_LIGHT / (self.omega0 * self.integration_s * rotation_rate)


@dataclass(frozen=True)
class RotationModel:
    """Physical rotation with a sinusoidally modulated rate.

    The rotation angle is the integral of  base_rate + mod_amplitude*sin(mod_rate*t),
    i.e.  theta(t) = base_rate*t + (mod_amplitude/mod_rate)*(1 - cos(mod_rate*t)).
    Points are (cross_range, range) offsets in meters from the rotation center,
    which sits at ``distance_m`` from the radar along the line of sight.
    """

    base_rate: float                 # rad/s
    mod_amplitude: float = 0.0       # rad/s
    mod_rate: float = 1.0            # rad/s
    distance_m: float = 2000.0
    points: tuple = field(default_factory=tuple)  # ((x, y), ...) in meters

    def __post_init__(self):
        check_positive(self.base_rate, "base_rate")
        check_positive(self.distance_m, "distance_m")
        if self.mod_amplitude < 0:
            raise ValueError("mod_amplitude must be >= 0")
        if self.mod_amplitude and self.mod_rate <= 0:
            raise ValueError("mod_rate must be positive when modulation is present")
        if not self.points:
            raise ValueError("need at least one point")
        object.__setattr__(self, "points", tuple((float(x), float(y)) for x, y in self.points))

    def angle(self, t):
        """Accumulated rotation angle theta(t), theta(0) = 0."""
        t = np.asarray(t, dtype=float)
        theta = self.base_rate * t
        if self.mod_amplitude:
            theta = theta + (self.mod_amplitude / self.mod_rate) * (1.0 - np.cos(self.mod_rate * t))
        return theta


def synthesize_rotating(params: RadarParams, rotation: RotationModel) -> np.ndarray:
    """Raw return of a rotating cluster of unit point reflectors.

    Per chirp m the model rotates each point by theta(m*T_r), takes its
    line-of-sight offset  r(t) = x*sin(theta) + y*cos(theta)  relative to the
    rotation center, and emits

        exp(j*2*omega0*r/c) * exp(j*2*pi*(r/range_resolution)*n/N)

    so Doppler phase tracks the radial displacement and the fast-time bin
    tracks instantaneous range (referenced to the center distance).
    """
    m_idx = np.arange(params.chirps, dtype=float)
    theta = rotation.angle(m_idx * params.chirp_interval)
    sin_t, cos_t = np.sin(theta), np.cos(theta)
    n_idx = np.arange(params.samples_per_chirp, dtype=float)
    grid = np.zeros((params.chirps, params.samples_per_chirp), dtype=np.complex128)
    for x, y in rotation.points:
        radial = x * sin_t + y * cos_t          # per-chirp LOS offset, meters
        doppler = np.exp(2j * params.omega0 * radial / C_LIGHT)
        bins = radial / params.range_resolution  # fractional fast-time bin per chirp
        fast = np.exp(2j * np.pi * bins[:, None] * n_idx[None, :] / params.samples_per_chirp)
        grid += doppler[:, None] * fast
    return grid


def _block_starts(total: int, runs: int, block_len: int, rng) -> np.ndarray:
    """Uniformly draw ``runs`` non-overlapping, non-adjacent runs on a line.

    Gap layout: g0 + b + g1 + b + ... + b + g_runs = total, interior gaps >= 1.
    Sampled through the standard composition bijection.
    """
    free = total - runs * block_len
    extra = free - (runs - 1)
    if extra < 0:
        raise ValueError("block removal does not fit: too many runs for the grid")
    # composition of `extra` into runs+1 non-negative parts
    cuts = np.sort(rng.choice(extra + runs, size=runs, replace=False))
    bounds = np.concatenate(([-1], cuts, [extra + runs]))
    parts = np.diff(bounds) - 1
    gaps = parts.astype(np.int64)
    gaps[1:-1] += 1  # interior gaps carry the mandatory separator
    starts = np.cumsum(gaps[:-1]) + block_len * np.arange(runs)
    return starts


def make_mask(m_chirps: int, n_samples: int, fraction_available: float,
              mode: str = "scattered", block_len: int | None = None,
              seed=0) -> np.ndarray:
    """Boolean availability mask with exactly round(fraction * M * N) True flags.

    "scattered" drops cells uniformly at random; "blocks" removes runs of
    ``block_len`` consecutive fast-time samples (runs may span chirp
    boundaries, never overlap and never touch).  Deterministic per seed.
    """
    m_chirps, n_samples = _check_dims(m_chirps, n_samples)
    total = m_chirps * n_samples
    if not 0.0 < fraction_available <= 1.0:
        raise ValueError("fraction_available must lie in (0, 1]")
    n_avail = int(round(fraction_available * total))
    if n_avail < 1:
        raise ValueError("fraction_available keeps no samples")
    rng = np.random.default_rng(seed)
    flat = np.zeros(total, dtype=bool)
    if mode == "scattered":
        flat[rng.choice(total, size=n_avail, replace=False)] = True
    elif mode == "blocks":
        if block_len is None or int(block_len) < 1:
            raise ValueError("blocks mode needs block_len >= 1")
        block_len = int(block_len)
        removed = total - n_avail
        if removed % block_len:
            raise ValueError(f"removed count {removed} is not a multiple of block_len {block_len}")
        flat[:] = True
        runs = removed // block_len
        if runs:
            for s in _block_starts(total, runs, block_len, rng):
                flat[s:s + block_len] = False
    else:
        raise ValueError(f"unknown mask mode {mode!r}")
    return flat.reshape(m_chirps, n_samples)


def add_noise(grid, snr_db: float, seed=0) -> tuple[np.ndarray, np.ndarray]:
    """Add circular complex Gaussian noise at an exactly realized input SNR.

    The drawn noise is rescaled so that 10*log10(E_signal/E_noise) equals
    ``snr_db`` to machine precision.  ``snr_db=inf`` is the no-noise sentinel.
    Returns (noisy grid, noise actually added).
    """
    grid = check_complex_grid(grid)
    e_signal = float(np.sum(np.abs(grid) ** 2))
    if e_signal <= 0:
        raise ValueError("signal energy is zero, SNR undefined")
    if np.isinf(snr_db):
        if snr_db < 0:
            raise ValueError("snr_db = -inf is not meaningful")
        return grid.copy(), np.zeros_like(grid)
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    e_target = e_signal * 10.0 ** (-snr_db / 10.0)
    noise = raw * np.sqrt(e_target / np.sum(np.abs(raw) ** 2))
    return grid + noise, noise
