"""Command-line front end: ``jjrough {field,validate-ab,ensemble,sweep}``."""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import analysis_from_dict, ensemble_config_from_dict, load_config
from .domain import ValidationError
from .ensemble import SampleError, default_workers, run_ensemble, run_sweep, write_sweep_csv
from .randfield import estimate_statistics, fit_correlation_length, synthesize_field, write_field_csv
from .stats import (MIN_FIT_SAMPLES, config_hash, fit_report, sample_report, transmon_frequency,
                    write_histogram_csv)
from .transport import QuadratureError, TableRangeError, ab_sweep, length_scales, write_ab_sweep_csv

log = logging.getLogger("jjrough")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_COMPUTATION = 3
EXIT_IO = 4


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(out_dir: Path, name: str, command: str, resolved: dict, master_seed: int,
                   outputs, started: float) -> Path:
    manifest = {
        "tool_version": __version__,
        "command": command,
        "config_hash": config_hash(resolved),
        "master_seed": int(master_seed),
        "outputs": {p.name: _sha256(p) for p in outputs},
        "wall_time_s": time.perf_counter() - started,
    }
    path = out_dir / name
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _resolve(args):
    doc = load_config(args.config)
    cfg = ensemble_config_from_dict(doc)
    if args.seed is not None:
        if not 0 <= args.seed < 2 ** 64:
            raise ValidationError([("--seed", "must be an unsigned 64-bit integer")])
        cfg = replace(cfg, master_seed=args.seed)
    if getattr(args, "samples", None) is not None:
        if args.samples < 1:
            raise ValidationError([("--samples", "must be >= 1")])
        cfg = replace(cfg, n_samples=args.samples)
    analysis = analysis_from_dict(doc)
    resolved = dict(cfg.as_dict(), analysis=analysis)
    return cfg, analysis, resolved


def _header(resolved: dict, master_seed: int):
    return [f"tool_version={__version__}", f"master_seed={int(master_seed)}",
            f"config={json.dumps(resolved, sort_keys=True)}"]


def cmd_field(args) -> list[Path]:
    started = time.perf_counter()
    cfg, _, resolved = _resolve(args)
    out = Path(args.out)
    seed = cfg.master_seed
    field = synthesize_field(cfg.grid, cfg.rough, seed, standardize=cfg.standardize_fields)
    csv_path = out / f"field_{seed}.csv"
    write_field_csv(field, csv_path)
    rms, radial = estimate_statistics(field)
    stats = {"seed": seed, "rms_nm": rms, "sigma_nm": cfg.rough.sigma, "xi_nm": cfg.rough.xi,
             "radial_autocovariance": {"r_nm": radial[:, 0].tolist(), "c_nm2": radial[:, 1].tolist()}}
    if rms > 0:
        stats["fitted_xi_nm"] = fit_correlation_length(radial)[1]
    stats_path = out / f"field_{seed}_stats.json"
    stats_path.write_text(json.dumps(stats, indent=2) + "\n", encoding="utf-8")
    outputs = [csv_path, stats_path]
    write_manifest(out, f"field_{seed}_manifest.json", "field", resolved, seed, outputs, started)
    return outputs


def cmd_validate_ab(args) -> list[Path]:
    started = time.perf_counter()
    cfg, _, resolved = _resolve(args)
    if not 0 < args.d_min < args.d_max:
        raise ValidationError([("--d-min/--d-max", "need 0 < d_min < d_max")])
    if args.n_points < 1:
        raise ValidationError([("--n-points", "must be >= 1")])
    rows = ab_sweep(cfg.junction, args.d_min, args.d_max, args.n_points)
    out = Path(args.out)
    path = out / "ab_validation.csv"
    scales = length_scales(cfg.junction)
    header = _header(resolved, cfg.master_seed) + [
        f"d_min_nm={args.d_min!r}", f"d_max_nm={args.d_max!r}", f"n_points={args.n_points}",
        f"kappa_per_nm={scales.kappa!r}"]
    write_ab_sweep_csv(rows, path, header)
    write_manifest(out, "ab_validation_manifest.json", "validate-ab", resolved, cfg.master_seed,
                   [path], started)
    return [path]


def cmd_ensemble(args) -> list[Path]:
    started = time.perf_counter()
    cfg, analysis, resolved = _resolve(args)
    out = Path(args.out)
    result = run_ensemble(cfg, workers=args.workers)
    fit = result.fit() if cfg.n_samples >= MIN_FIT_SAMPLES else None
    transmon = None
    if fit is not None and analysis["e_c_ghz"] is not None:
        transmon = transmon_frequency(fit.mean_EJ, fit.std_EJ, analysis["e_c_ghz"])
    outputs = []
    try:
        samples = out / "samples.csv"
        outputs.append(samples)
        result.write_csv(samples)
        if fit is None:
            report = sample_report(result.ej, resolved,
                                   f"log-normal fit needs at least {MIN_FIT_SAMPLES} samples")
        else:
            report = fit_report(fit, resolved, transmon)
        report["n_clamped_pixels"] = result.n_clamped
        fit_path = out / "fit.json"
        outputs.append(fit_path)
        fit_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        hist = out / "histogram.csv"
        outputs.append(hist)
        write_histogram_csv(result.ej, fit, analysis["n_bins"], hist, _header(resolved, cfg.master_seed))
        outputs.append(write_manifest(out, "manifest.json", "ensemble", resolved, cfg.master_seed,
                                      outputs, started))
    except BaseException:
        for p in outputs:
            p.unlink(missing_ok=True)
        raise
    if fit is not None:
        log.info("E_J/h = %.3f +- %.3f GHz (n=%d)", fit.mean_EJ, fit.std_EJ, fit.n)
    return outputs[:-1]


def _float_list(text: str):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("list must be non-empty")
    return values


def cmd_sweep(args) -> list[Path]:
    started = time.perf_counter()
    cfg, _, resolved = _resolve(args)
    resolved = dict(resolved, sweep={"sigmas_nm": args.sigmas, "xis_nm": args.xis})
    out = Path(args.out)
    cells = run_sweep(cfg, args.sigmas, args.xis, workers=args.workers)
    path = out / "sweep.csv"
    try:
        write_sweep_csv(cells, cfg, path)
        write_manifest(out, "sweep_manifest.json", "sweep", resolved, cfg.master_seed, [path], started)
    except BaseException:
        path.unlink(missing_ok=True)
        raise
    return [path]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON run configuration")
    common.add_argument("--out", default=".", help="output directory (created if missing)")
    common.add_argument("--seed", type=int, default=None, help="override ensemble.master_seed")
    common.add_argument("--workers", type=int, default=default_workers(),
                        help="worker processes (results do not depend on it)")
    common.add_argument("--samples", type=int, default=None, help="override ensemble.n_samples")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="jjrough", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field", parents=[common], help="synthesise one interface field")
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("validate-ab", parents=[common],
                       help="uniform-barrier sweep: AB relation vs short-junction supercurrent")
    p.add_argument("--d-min", type=float, default=0.5)
    p.add_argument("--d-max", type=float, default=1.5)
    p.add_argument("--n-points", type=int, default=21)
    p.set_defaults(func=cmd_validate_ab)

    p = sub.add_parser("ensemble", parents=[common], help="Monte Carlo ensemble, fit and histogram")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("sweep", parents=[common], help="(sigma, xi) grid of ensembles")
    p.add_argument("--sigmas", type=_float_list, required=True, help="comma-separated sigma values (nm)")
    p.add_argument("--xis", type=_float_list, required=True, help="comma-separated xi values (nm)")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    np.seterr(over="ignore", under="ignore")
    try:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        outputs = args.func(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (SampleError, QuadratureError, TableRangeError, ArithmeticError) as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    for p in outputs:
        print(p)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
