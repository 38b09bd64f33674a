"""Scenario files: a small versioned JSON schema plus canned presets.

A scenario fully determines a run: grid geometry, signal source, mask,
optional noise, and the recovery method with its knobs.  Validation is
strict; unknown fields anywhere are rejected so typos cannot silently
change an experiment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import synthesis
from .synthesis import RadarParams, RotationModel, Scatterer

SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    """Scenario file is malformed or inconsistent."""


def _require(cond, msg):
    if not cond:
        raise ScenarioError(msg)


def _check_keys(section: dict, allowed: dict, where: str) -> None:
    _require(isinstance(section, dict), f"{where} must be an object")
    unknown = set(section) - set(allowed)
    _require(not unknown, f"unknown field(s) in {where}: {sorted(unknown)}")
    missing = {k for k, required in allowed.items() if required and k not in section}
    _require(not missing, f"missing field(s) in {where}: {sorted(missing)}")


def _num(section, key, where, *, default=None, minimum=None, allow_str=()):
    v = section.get(key, default)
    if isinstance(v, str):
        _require(v in allow_str, f"{where}.{key}: unexpected string {v!r}")
        return v
    _require(isinstance(v, (int, float)) and not isinstance(v, bool),
             f"{where}.{key} must be a number")
    if minimum is not None:
        _require(v >= minimum, f"{where}.{key} must be >= {minimum}")
    return v


def _int(section, key, where, *, default=None, minimum=None):
    v = section.get(key, default)
    _require(isinstance(v, int) and not isinstance(v, bool),
             f"{where}.{key} must be an integer")
    if minimum is not None:
        _require(v >= minimum, f"{where}.{key} must be >= {minimum}")
    return v


_GRID_KEYS = {"chirps": True, "samples_per_chirp": True, "indexing": False}
_SCATTERER_KEYS = {"amplitude": True, "cross_bin": True, "range_bin": False, "chirp_rate": False}
_RANDOM_KEYS = {"kind": True, "count": True, "amplitude_min": True, "amplitude_max": True, "seed": True}
_RADAR_KEYS = {"carrier_hz": True, "bandwidth_hz": True, "integration_s": True}
_ROTATION_KEYS = {"base_rate": True, "mod_amplitude": False, "mod_rate": False,
                  "distance_m": False, "points": True}
_MASK_KEYS = {"fraction_available": True, "mode": False, "block_len": False, "seed": False}
_NOISE_KEYS = {"snr_db": True, "seed": False}
_SWEEP_KEYS = {"fractions_available": False, "k_hats": False, "snrs_db": False, "trials": False}
_RECOVERY_KEYS = {
    "direct": {"method": True, "k_hat": False, "rcond_threshold": False},
    "iterative": {"method": True, "max_components": False, "tol": False, "rcond_threshold": False},
    "gradient": {"method": True, "corrections": False, "delta_init": False,
                 "delta_shrink": False, "stall_ratio": False, "tr_threshold": False,
                 "max_sweeps": False, "delta_min": False, "inner_sweeps": False,
                 "shrink_on": False},
}
_TOP_KEYS = {"schema_version": True, "name": False, "grid": True, "signal": True,
             "mask": False, "noise": False, "recovery": False, "sweep": False}


@dataclass
class Scenario:
    raw: dict

    @property
    def name(self) -> str:
        return self.raw.get("name", "scenario")

    @property
    def chirps(self) -> int:
        return self.raw["grid"]["chirps"]

    @property
    def samples_per_chirp(self) -> int:
        return self.raw["grid"]["samples_per_chirp"]

    @property
    def indexing(self) -> str:
        return self.raw["grid"].get("indexing", "zero")

    @property
    def signal(self) -> dict:
        return self.raw["signal"]

    @property
    def mask_spec(self):
        return self.raw.get("mask")

    @property
    def noise_spec(self):
        return self.raw.get("noise")

    @property
    def recovery_spec(self):
        return self.raw.get("recovery")

    @property
    def sweep_spec(self):
        return self.raw.get("sweep")


def validate(data: dict) -> Scenario:
    _check_keys(data, _TOP_KEYS, "scenario")
    _require(data["schema_version"] == SCHEMA_VERSION,
             f"unsupported schema_version {data.get('schema_version')!r}, expected {SCHEMA_VERSION}")
    if "name" in data:
        _require(isinstance(data["name"], str), "name must be a string")

    grid = data["grid"]
    _check_keys(grid, _GRID_KEYS, "grid")
    m = _int(grid, "chirps", "grid", minimum=1)
    n = _int(grid, "samples_per_chirp", "grid", minimum=1)
    if "indexing" in grid:
        _require(grid["indexing"] in ("zero", "symmetric"),
                 "grid.indexing must be 'zero' or 'symmetric'")

    sig = data["signal"]
    _require(isinstance(sig, dict) and "kind" in sig, "signal needs a 'kind'")
    kind = sig["kind"]
    if kind == "scatterers":
        _check_keys(sig, {"kind": True, "components": True}, "signal")
        comps = sig["components"]
        _require(isinstance(comps, list) and comps, "signal.components must be a non-empty list")
        for i, c in enumerate(comps):
            _check_keys(c, _SCATTERER_KEYS, f"signal.components[{i}]")
            _num(c, "amplitude", f"signal.components[{i}]")
            _num(c, "cross_bin", f"signal.components[{i}]")
            _num(c, "range_bin", f"signal.components[{i}]", default=0.0)
            _num(c, "chirp_rate", f"signal.components[{i}]", default=0.0)
    elif kind == "random_scatterers":
        _check_keys(sig, _RANDOM_KEYS, "signal")
        count = _int(sig, "count", "signal", minimum=1)
        _require(count <= m * n, "signal.count exceeds grid size")
        lo = _num(sig, "amplitude_min", "signal", minimum=0.0)
        hi = _num(sig, "amplitude_max", "signal")
        _require(hi >= lo > 0, "need 0 < amplitude_min <= amplitude_max")
        _int(sig, "seed", "signal", minimum=0)
    elif kind == "rotating":
        _check_keys(sig, {"kind": True, "radar": True, "rotation": True}, "signal")
        _check_keys(sig["radar"], _RADAR_KEYS, "signal.radar")
        for key in ("carrier_hz", "bandwidth_hz", "integration_s"):
            _num(sig["radar"], key, "signal.radar", minimum=1e-12)
        rot = sig["rotation"]
        _check_keys(rot, _ROTATION_KEYS, "signal.rotation")
        _num(rot, "base_rate", "signal.rotation", minimum=1e-12)
        _num(rot, "mod_amplitude", "signal.rotation", default=0.0, minimum=0.0)
        _num(rot, "mod_rate", "signal.rotation", default=1.0, minimum=1e-12)
        _num(rot, "distance_m", "signal.rotation", default=2000.0, minimum=1e-9)
        pts = rot["points"]
        _require(isinstance(pts, list) and pts, "signal.rotation.points must be a non-empty list")
        for i, p in enumerate(pts):
            _require(isinstance(p, list) and len(p) == 2
                     and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in p),
                     f"signal.rotation.points[{i}] must be [x, y]")
    else:
        raise ScenarioError(f"unknown signal.kind {kind!r}")

    if "mask" in data:
        mask = data["mask"]
        _check_keys(mask, _MASK_KEYS, "mask")
        frac = _num(mask, "fraction_available", "mask")
        _require(0.0 < frac <= 1.0, "mask.fraction_available must lie in (0, 1]")
        mode = mask.get("mode", "scattered")
        _require(mode in ("scattered", "blocks"), "mask.mode must be 'scattered' or 'blocks'")
        if mode == "blocks":
            _int(mask, "block_len", "mask", minimum=1)
        elif "block_len" in mask:
            raise ScenarioError("mask.block_len only applies to blocks mode")
        _int(mask, "seed", "mask", default=0, minimum=0)

    if "noise" in data:
        noise = data["noise"]
        _check_keys(noise, _NOISE_KEYS, "noise")
        _num(noise, "snr_db", "noise")
        _int(noise, "seed", "noise", default=0, minimum=0)

    if "recovery" in data:
        rec = data["recovery"]
        _require(isinstance(rec, dict) and "method" in rec, "recovery needs a 'method'")
        method = rec["method"]
        _require(method in _RECOVERY_KEYS, f"unknown recovery.method {method!r}")
        _check_keys(rec, _RECOVERY_KEYS[method], "recovery")
        if method == "direct" and "k_hat" in rec:
            _int(rec, "k_hat", "recovery", minimum=1)
        if method == "iterative" and "max_components" in rec:
            _int(rec, "max_components", "recovery", minimum=1)
        if method == "gradient":
            if "corrections" in rec:
                _int(rec, "corrections", "recovery", minimum=0)
            if "delta_init" in rec:
                _num(rec, "delta_init", "recovery", allow_str=("auto",))
            for key in ("delta_shrink", "stall_ratio", "tr_threshold", "delta_min"):
                if key in rec:
                    _num(rec, key, "recovery", minimum=1e-300)
            for key in ("max_sweeps", "inner_sweeps"):
                if key in rec:
                    _int(rec, key, "recovery", minimum=1)
            if "shrink_on" in rec:
                _require(rec["shrink_on"] in ("stall", "precision"),
                         "recovery.shrink_on must be 'stall' or 'precision'")
        _require("mask" in data, f"recovery method {method!r} needs a mask section")

    if "sweep" in data:
        sweep = data["sweep"]
        _check_keys(sweep, _SWEEP_KEYS, "sweep")
        for key in ("fractions_available", "k_hats", "snrs_db"):
            if key in sweep:
                v = sweep[key]
                _require(isinstance(v, list) and v, f"sweep.{key} must be a non-empty list")
                for item in v:
                    _require(isinstance(item, (int, float)) and not isinstance(item, bool),
                             f"sweep.{key} entries must be numbers")
        if "trials" in sweep:
            _int(sweep, "trials", "sweep", minimum=1)

    return Scenario(raw=data)


# ---------------------------------------------------------------------------
# building blocks

def build_signal(sc: Scenario) -> np.ndarray:
    """Materialize the clean complex grid a scenario describes."""
    sig = sc.signal
    m, n = sc.chirps, sc.samples_per_chirp
    if sig["kind"] == "scatterers":
        comps = [Scatterer(amplitude=c["amplitude"], cross_bin=c["cross_bin"],
                           range_bin=c.get("range_bin", 0.0), chirp_rate=c.get("chirp_rate", 0.0))
                 for c in sig["components"]]
        return synthesis.synthesize_nonuniform(comps, m, n, indexing=sc.indexing)
    if sig["kind"] == "random_scatterers":
        comps = draw_random_scatterers(m, n, sig["count"], sig["amplitude_min"],
                                       sig["amplitude_max"], sig["seed"])
        return synthesis.synthesize_uniform(comps, m, n)
    params, rotation = rotating_setup(sc)
    return synthesis.synthesize_rotating(params, rotation)


def draw_random_scatterers(m: int, n: int, count: int, amp_min: float,
                           amp_max: float, seed) -> list[Scatterer]:
    """Random integer-bin scatterers on distinct cells, amplitudes uniform."""
    rng = np.random.default_rng(seed)
    cells = rng.choice(m * n, size=count, replace=False)
    amps = rng.uniform(amp_min, amp_max, size=count)
    return [Scatterer(amplitude=float(a), cross_bin=float(c // n), range_bin=float(c % n))
            for a, c in zip(amps, cells)]


def rotating_setup(sc: Scenario) -> tuple[RadarParams, RotationModel]:
    radar = sc.signal["radar"]
    rot = sc.signal["rotation"]
    params = RadarParams(carrier_hz=radar["carrier_hz"], bandwidth_hz=radar["bandwidth_hz"],
                         integration_s=radar["integration_s"], chirps=sc.chirps,
                         samples_per_chirp=sc.samples_per_chirp)
    rotation = RotationModel(base_rate=rot["base_rate"],
                             mod_amplitude=rot.get("mod_amplitude", 0.0),
                             mod_rate=rot.get("mod_rate", 1.0),
                             distance_m=rot.get("distance_m", 2000.0),
                             points=tuple((p[0], p[1]) for p in rot["points"]))
    return params, rotation


def build_mask(sc: Scenario, seed_override=None) -> np.ndarray | None:
    spec = sc.mask_spec
    if spec is None:
        return None
    seed = spec.get("seed", 0) if seed_override is None else seed_override
    return synthesis.make_mask(sc.chirps, sc.samples_per_chirp, spec["fraction_available"],
                               mode=spec.get("mode", "scattered"),
                               block_len=spec.get("block_len"), seed=seed)


def apply_noise(sc: Scenario, grid: np.ndarray, seed_override=None):
    spec = sc.noise_spec
    if spec is None:
        return grid, np.zeros_like(grid)
    seed = spec.get("seed", 0) if seed_override is None else seed_override
    return synthesis.add_noise(grid, spec["snr_db"], seed=seed)


def integer_bins(sc: Scenario) -> bool:
    """True when every synthesized component sits exactly on a DFT bin."""
    sig = sc.signal
    if sig["kind"] == "random_scatterers":
        return True
    if sig["kind"] == "scatterers":
        return all(float(c["cross_bin"]).is_integer() and float(c.get("range_bin", 0.0)).is_integer()
                   and c.get("chirp_rate", 0.0) == 0.0 for c in sig["components"])
    return False


def manifest_dict(sc: Scenario) -> dict:
    """Fully resolved parameter echo for reproducibility."""
    from . import __version__
    out = {
        "schema_version": SCHEMA_VERSION,
        "name": sc.name,
        "package_version": __version__,
        "grid": {"chirps": sc.chirps, "samples_per_chirp": sc.samples_per_chirp,
                 "indexing": sc.indexing},
        "signal": sc.signal,
        "integer_bins": integer_bins(sc),
    }
    if sc.mask_spec is not None:
        spec = dict(sc.mask_spec)
        spec.setdefault("mode", "scattered")
        spec.setdefault("seed", 0)
        total = sc.chirps * sc.samples_per_chirp
        spec["n_available"] = int(round(spec["fraction_available"] * total))
        out["mask"] = spec
    if sc.noise_spec is not None:
        spec = dict(sc.noise_spec)
        spec.setdefault("seed", 0)
        out["noise"] = spec
    if sc.recovery_spec is not None:
        out["recovery"] = _resolved_recovery(sc.recovery_spec)
    if sc.sweep_spec is not None:
        out["sweep"] = dict(sc.sweep_spec)
    if sc.signal["kind"] == "rotating":
        params, rotation = rotating_setup(sc)
        out["derived"] = {
            "range_resolution_m": params.range_resolution,
            "cross_range_resolution_m": params.cross_range_resolution(rotation.base_rate),
            "chirp_interval_s": params.chirp_interval,
        }
    return out


def _resolved_recovery(rec: dict) -> dict:
    method = rec["method"]
    defaults = {
        "direct": {"k_hat": None, "rcond_threshold": 1e-10},
        "iterative": {"max_components": None, "tol": None, "rcond_threshold": 1e-10},
        "gradient": {"corrections": 0, "delta_init": "auto", "delta_shrink": math.sqrt(10.0),
                     "stall_ratio": 0.01, "tr_threshold": 0.001, "max_sweeps": 1000,
                     "delta_min": 1e-12, "inner_sweeps": 1, "shrink_on": "stall"},
    }[method]
    resolved = {"method": method}
    for key, dflt in defaults.items():
        resolved[key] = rec.get(key, dflt)
    return resolved


# ---------------------------------------------------------------------------
# presets

_TARGET_POINTS = [[-3.5, -3.5], [-3.5, -0.5], [-3.5, 2.5], [0.0, -3.0], [0.0, 0.0],
                  [0.0, 3.0], [2.5, -3.0], [2.5, 0.0], [2.5, 3.5], [3.5, -1.5],
                  [3.5, 2.5], [-2.0, 2.0], [-2.0, -3.0], [5.0, 0.5], [5.0, 3.0]]

_DOPPLER_COMPONENTS = [
    # three real cosine chirps as conjugate-symmetric pairs on a 128-chirp axis
    {"amplitude": math.sqrt(0.6), "cross_bin": 52.0, "chirp_rate": -1.1 * math.pi / 1024},
    {"amplitude": math.sqrt(0.6), "cross_bin": -52.0, "chirp_rate": 1.1 * math.pi / 1024},
    {"amplitude": math.sqrt(0.5), "cross_bin": 10.0, "chirp_rate": math.pi / 1024},
    {"amplitude": math.sqrt(0.5), "cross_bin": -10.0, "chirp_rate": -math.pi / 1024},
    {"amplitude": math.sqrt(0.25), "cross_bin": 32.0, "chirp_rate": -0.375 * math.pi / 1024},
    {"amplitude": math.sqrt(0.25), "cross_bin": -32.0, "chirp_rate": 0.375 * math.pi / 1024},
]


def _rotating_signal(integration_s: float) -> dict:
    return {
        "kind": "rotating",
        "radar": {"carrier_hz": 10.1e9, "bandwidth_hz": 300e6, "integration_s": integration_s},
        "rotation": {"base_rate": 4.0 * math.pi / 180.0,
                     "mod_amplitude": 1.25 * math.pi / 180.0,
                     "mod_rate": math.pi,
                     "distance_m": 2000.0,
                     "points": [list(p) for p in _TARGET_POINTS]},
    }


def preset(name: str) -> Scenario:
    """Built-in scenarios; names: example1..example4, example4-desk, example4-paper."""
    if name == "example1":
        data = {
            "schema_version": 1,
            "name": "example1",
            "grid": {"chirps": 64, "samples_per_chirp": 64, "indexing": "zero"},
            "signal": {"kind": "random_scatterers", "count": 10,
                       "amplitude_min": 0.125, "amplitude_max": 0.375, "seed": 130},
            "mask": {"fraction_available": 0.125, "mode": "scattered", "seed": 207},
            "recovery": {"method": "direct", "k_hat": 14},
        }
    elif name == "example2":
        data = preset("example1").raw
        data["name"] = "example2"
        data["noise"] = {"snr_db": 9.05, "seed": 31}
        data["sweep"] = {"k_hats": [14, 10], "trials": 100}
    elif name == "example3":
        data = {
            "schema_version": 1,
            "name": "example3",
            "grid": {"chirps": 128, "samples_per_chirp": 1, "indexing": "symmetric"},
            "signal": {"kind": "scatterers",
                       "components": [dict(c) for c in _DOPPLER_COMPONENTS]},
            # 45 of 128 chirps missing
            "mask": {"fraction_available": 83 / 128, "mode": "scattered", "seed": 5},
            "recovery": {"method": "gradient", "corrections": 5, "max_sweeps": 2000},
        }
    elif name in ("example4", "example4-desk"):
        data = {
            "schema_version": 1,
            "name": "example4-desk",
            "grid": {"chirps": 64, "samples_per_chirp": 64, "indexing": "zero"},
            "signal": _rotating_signal(integration_s=0.5),
            "mask": {"fraction_available": 0.5, "mode": "scattered", "seed": 11},
            # bounded budget: stop in the smooth descent regime; running the
            # sparsity measure to its floor over-concentrates the image
            "recovery": {"method": "gradient", "corrections": 6, "max_sweeps": 40},
        }
    elif name == "example4-paper":
        data = {
            "schema_version": 1,
            "name": "example4-paper",
            "grid": {"chirps": 256, "samples_per_chirp": 64, "indexing": "zero"},
            "signal": _rotating_signal(integration_s=2.0),
            "mask": {"fraction_available": 0.5, "mode": "scattered", "seed": 11},
            "recovery": {"method": "gradient", "corrections": 6, "max_sweeps": 40},
        }
    else:
        raise ScenarioError(f"unknown preset {name!r}")
    return validate(data)
