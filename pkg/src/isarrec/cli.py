"""Command line front end.

Subcommands
-----------
preset      list built-in scenarios or dump one as JSON
synth       materialize a scenario's signal grid to CSV/PGM
recover     run the configured recovery and write reports + images
snr-sweep   Monte Carlo output-SNR table over k_hat / fraction / SNR grids

Exit codes: 0 success, 2 bad input, 3 singular system, 4 not converged.
All outputs are deterministic; rerunning a command reproduces files byte
for byte.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import io as iomod
from . import scenario as scen
from .analysis import monte_carlo_snr, snr_input
from .direct import SingularSystemError, recover_direct, recover_iterative
from .gradient import GradientConfig, recover_gradient
from .transforms import dft2, smethod

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_SINGULAR = 3
EXIT_NOT_CONVERGED = 4


class NotConvergedError(RuntimeError):
    pass


def _fail(exc: Exception, code: int) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


def _load_scenario(args) -> scen.Scenario:
    if args.preset:
        sc = scen.preset(args.preset)
    else:
        with open(args.scenario, "r", encoding="utf-8") as fh:
            sc = scen.validate(json.load(fh))
    if getattr(args, "seed_override", None) is not None:
        s = args.seed_override
        raw = sc.raw
        if "mask" in raw:
            raw["mask"]["seed"] = s
        if "noise" in raw:
            raw["noise"]["seed"] = s + 1000
        if raw["signal"]["kind"] == "random_scatterers":
            raw["signal"]["seed"] = s + 2000
    return sc


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _build(sc: scen.Scenario):
    clean = scen.build_signal(sc)
    noisy, noise = scen.apply_noise(sc, clean)
    mask = scen.build_mask(sc)
    return clean, noisy, noise, mask


def cmd_preset(args) -> int:
    names = ["example1", "example2", "example3", "example4-desk", "example4-paper"]
    if args.list:
        for name in names:
            print(name)
        return EXIT_OK
    sc = scen.preset(args.name)
    text = json.dumps(sc.raw, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_synth(args) -> int:
    sc = _load_scenario(args)
    out = _outdir(args)
    clean, noisy, noise, mask = _build(sc)
    manifest = scen.manifest_dict(sc)
    if sc.noise_spec is not None:
        manifest["realized_snr_db"] = snr_input(clean, noise)
    iomod.write_json(out / "manifest.json", manifest)
    iomod.save_grid_csv(out / "grid.csv", noisy)
    iomod.save_pgm(out / "spectrum.pgm", dft2(noisy))
    if mask is not None:
        iomod.save_grid_csv(out / "available.csv",
                            np.where(mask, noisy, complex(np.nan, np.nan)),
                            allow_nan=True)
    print(f"wrote {out}/grid.csv ({sc.chirps}x{sc.samples_per_chirp})")
    return EXIT_OK


def cmd_recover(args) -> int:
    sc = _load_scenario(args)
    if sc.recovery_spec is None:
        raise scen.ScenarioError("scenario has no recovery section")
    out = _outdir(args)
    clean, noisy, noise, mask = _build(sc)
    rec = scen._resolved_recovery(sc.recovery_spec)
    manifest = scen.manifest_dict(sc)
    iomod.write_json(out / "manifest.json", manifest)

    zero_filled = np.where(mask, noisy, 0)
    method = rec["method"]
    if method == "gradient":
        level = rec["corrections"]
        iomod.save_pgm(out / "before.pgm", smethod(dft2(zero_filled), level))
        frame_cb = None
        if args.dump_frames:
            frames = out / "frames"
            frames.mkdir(exist_ok=True)

            def frame_cb(sweep: int, y: np.ndarray) -> None:
                iomod.save_pgm(frames / f"sweep{sweep:04d}.pgm", smethod(dft2(y), level))

        config = GradientConfig(corrections=level, delta_init=rec["delta_init"],
                                delta_shrink=rec["delta_shrink"], stall_ratio=rec["stall_ratio"],
                                tr_threshold=rec["tr_threshold"], max_sweeps=rec["max_sweeps"],
                                delta_min=rec["delta_min"], inner_sweeps=rec["inner_sweeps"],
                                shrink_on=rec["shrink_on"])
        recovered, trace = recover_gradient(noisy, mask, config=config, frame_callback=frame_cb)
        iomod.save_grid_csv(out / "recovered.csv", recovered)
        iomod.save_pgm(out / "after.pgm", smethod(dft2(recovered), level))
        iomod.write_json(out / "trace.json", iomod.trace_to_dict(trace))
        if not trace.converged:
            raise NotConvergedError(
                f"gradient recovery stopped after {trace.sweeps} sweeps without converging")
        print(f"converged in {trace.sweeps} sweeps; outputs in {out}")
        return EXIT_OK

    if method == "direct":
        report = recover_direct(noisy, mask, k_hat=rec["k_hat"],
                                rcond_threshold=rec["rcond_threshold"])
    else:
        report = recover_iterative(noisy, mask, max_components=rec["max_components"],
                                   tol=rec["tol"], rcond_threshold=rec["rcond_threshold"])
    iomod.save_pgm(out / "before.pgm", dft2(zero_filled))
    iomod.save_grid_csv(out / "recovered.csv", report.grid)
    iomod.save_pgm(out / "after.pgm", report.spectrum)
    iomod.write_json(out / "report.json", iomod.report_to_dict(report))
    print(f"residual on available samples: {report.residual_available:.3e}; outputs in {out}")
    return EXIT_OK


def cmd_snr_sweep(args) -> int:
    sc = _load_scenario(args)
    if sc.mask_spec is None or sc.noise_spec is None:
        raise scen.ScenarioError("snr-sweep needs mask and noise sections")
    rec = sc.recovery_spec
    if rec is not None and rec.get("method") != "direct":
        raise scen.ScenarioError("snr-sweep only supports direct recovery")
    out = _outdir(args)
    clean = scen.build_signal(sc)
    total = sc.chirps * sc.samples_per_chirp

    sweep = sc.sweep_spec or {}
    fractions = sweep.get("fractions_available", [sc.mask_spec["fraction_available"]])
    snrs = sweep.get("snrs_db", [sc.noise_spec["snr_db"]])
    default_k = (rec or {}).get("k_hat")
    k_hats = sweep.get("k_hats", [default_k] if default_k else [])
    if not k_hats:
        raise scen.ScenarioError("no k_hat values: set recovery.k_hat or sweep.k_hats")
    trials = args.trials or sweep.get("trials", 100)
    base_seed = sc.noise_spec.get("seed", 0)

    manifest = scen.manifest_dict(sc)
    manifest["sweep_resolved"] = {"fractions_available": list(fractions), "k_hats": list(k_hats),
                                  "snrs_db": list(snrs), "trials": trials}
    iomod.write_json(out / "manifest.json", manifest)

    rows = []
    for snr_db in snrs:
        for fraction in fractions:
            for k_hat in k_hats:
                rep = monte_carlo_snr(clean, snr_db=snr_db, fraction_available=fraction,
                                      k_hat=int(k_hat), trials=trials, seed=base_seed,
                                      mask_mode=sc.mask_spec.get("mode", "scattered"),
                                      block_len=sc.mask_spec.get("block_len"))
                rows.append(rep)
                print(f"snr_in={snr_db:g} dB  N_A={int(round(fraction * total))}  "
                      f"k_hat={int(k_hat)}  ->  out={rep.snr_out_db:.2f} dB  "
                      f"(predicted {rep.snr_predicted_db:.2f} dB, {rep.failures} failures)")

    with open(out / "snr_sweep.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["snr_in_db", "n_available", "k_hat", "trials", "failures",
                         "snr_out_mean_db", "snr_out_std_db", "snr_predicted_db"])
        for rep in rows:
            writer.writerow([repr(float(rep.snr_in_db)), rep.n_available, rep.k_hat,
                             rep.trials, rep.failures, repr(float(rep.snr_out_db)),
                             repr(float(rep.snr_out_std_db)), repr(float(rep.snr_predicted_db))])
    iomod.write_json(out / "snr_sweep.json",
                     {"results": [iomod.snr_report_to_dict(rep) for rep in rows]})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isarrec",
                                     description="Sparse recovery toolkit for radar imaging "
                                                 "with missing samples")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preset", help="list or dump built-in scenarios")
    p.add_argument("--list", action="store_true", help="list preset names")
    p.add_argument("--name", help="preset to dump as JSON")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_preset)

    for name, func, extra in [("synth", cmd_synth, ()),
                              ("recover", cmd_recover, ("dump_frames",)),
                              ("snr-sweep", cmd_snr_sweep, ("trials",))]:
        p = sub.add_parser(name)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--scenario", help="path to scenario JSON")
        src.add_argument("--preset", help="built-in scenario name")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed-override", type=int, default=None,
                       help="replace mask/noise/signal seeds with S, S+1000, S+2000")
        if "dump_frames" in extra:
            p.add_argument("--dump-frames", action="store_true",
                           help="write a PGM image per sweep")
        if "trials" in extra:
            p.add_argument("--trials", type=int, default=None)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "preset" and not args.list and not args.name:
        parser.error("preset: need --list or --name")
    try:
        return args.func(args)
    except SingularSystemError as exc:
        return _fail(exc, EXIT_SINGULAR)
    except NotConvergedError as exc:
        return _fail(exc, EXIT_NOT_CONVERGED)
    except (scen.ScenarioError, ValueError, OSError, json.JSONDecodeError) as exc:
        return _fail(exc, EXIT_BAD_INPUT)


if __name__ == "__main__":
    sys.exit(main())
