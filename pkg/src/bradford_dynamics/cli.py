"""Command-line front end.

    bradford simulate --alpha 0.1 --papers 10000 --reps 1000 --seed 42 --out runs/a01
    bradford analytic --alpha 0.25 --papers 10000
    bradford classify --k 1.5 --b 0.01 --t0 30
    bradford forecast --manifest history.csv --t-star 1986 --out runs/fc
    bradford ingest-check journals_1980.csv

Every command that writes files also writes ``manifest.json`` describing the
resolved configuration, seed, version, input checksums and outputs.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .curve import (
    DegenerateCoreError,
    EggheParams,
    InfeasibleError,
    assemble_curve,
    classify,
    curvature_signs,
)
from .export import curve_rows, write_curve_csv, write_frequency_csv, write_json
from .fit import DegenerateError, FitConvergenceError
from .model import DomainError, ZoneParams, analytic_zone_params
from .pipeline import (
    InsufficientDataError,
    ParseError,
    ValidationError,
    analyze_snapshot,
    build_history,
    file_checksum,
    forecast,
    ingest_manifest,
    ingest_snapshot,
    read_manifest,
)
from .sim import Constant, LinearDecreasing, SimConfig, run_ensemble

log = logging.getLogger("bradford")

USER_ERRORS = (DomainError, InfeasibleError, DegenerateCoreError, DegenerateError,
               FitConvergenceError, InsufficientDataError, ParseError, ValidationError,
               ValueError, OSError)

DEFAULTS = {
    "simulate": {"alpha": None, "alpha_start": None, "alpha_end": None, "gamma": 1.0,
                 "gamma_end": None, "papers": 10_000, "reps": 1000, "seed": 0,
                 "checkpoints": None},
    "analytic": {"alpha": None, "papers": None, "journals": None},
}


class ConfigError(ValueError):
    pass


def resolve(args: argparse.Namespace, command: str) -> dict:
    """Flags override config-file values, which override defaults."""
    cfg = dict(DEFAULTS.get(command, {}))
    if getattr(args, "config", None):
        loaded = json.loads(Path(args.config).read_text())
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key in cfg:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def write_manifest(out: Path, command: str, config: dict, outputs: list[Path],
                   seed=None, inputs: dict | None = None) -> Path:
    return write_json(out / "manifest.json", {
        "command": command,
        "config": config,
        "seed": seed,
        "version": __version__,
        "inputs": inputs or {},
        "outputs": sorted(p.name for p in outputs),
    })


def _print_table(pairs) -> None:
    width = max(len(k) for k, _ in pairs)
    for k, v in pairs:
        print(f"{k:<{width}}  {v!r}" if isinstance(v, float) else f"{k:<{width}}  {v}")


# ---------------------------------------------------------------------------


def build_sim_config(cfg: dict) -> SimConfig:
    if cfg["alpha"] is not None and (cfg["alpha_start"] is not None or cfg["alpha_end"] is not None):
        raise ConfigError("give either alpha or alpha_start/alpha_end, not both")
    try:
        if cfg["alpha"] is not None:
            schedule = Constant(cfg["alpha"])
        elif cfg["alpha_start"] is not None and cfg["alpha_end"] is not None:
            schedule = LinearDecreasing(cfg["alpha_start"], cfg["alpha_end"])
        else:
            raise ConfigError("alpha (or alpha_start and alpha_end) is required")
    except ValueError as exc:
        raise ConfigError(f"entry rate: {exc}") from None
    return SimConfig(entry_schedule=schedule, target_A=int(cfg["papers"]),
                     decay_gamma=cfg["gamma"], decay_gamma_end=cfg["gamma_end"],
                     replications=int(cfg["reps"]), master_seed=int(cfg["seed"]))


def cmd_simulate(args) -> int:
    cfg = resolve(args, "simulate")
    config = build_sim_config(cfg)
    checkpoints = cfg["checkpoints"]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    log.info("simulating %d replications of %d papers", config.replications, config.target_A)
    results = run_ensemble(config, checkpoints=checkpoints, threads=args.threads)
    if not checkpoints:
        results = [results]

    outputs = []
    for res in results:
        suffix = "" if len(results) == 1 else f"_A{res.A}"
        zone = np.where(res.mean_ranked > res.y_m, "core", "normal")
        rows = list(zip(range(1, res.mean_cumulative.size + 1), res.mean_cumulative, zone))
        outputs.append(write_json(out / f"ensemble{suffix}.json", res.to_dict()))
        if args.format == "csv":
            outputs.append(write_frequency_csv(out / f"frequency{suffix}.csv", res.mean_frequency))
            outputs.append(write_curve_csv(out / f"curve{suffix}.csv", rows))
        else:
            outputs.append(write_json(out / f"frequency{suffix}.json", res.mean_frequency.as_dict()))
            outputs.append(write_json(out / f"curve{suffix}.json",
                                      [{"r": r, "R": R, "zone": z} for r, R, z in rows]))
        print(f"A={res.A}: T={res.mean_T!r} T0={res.mean_T0!r} A0={res.mean_A0!r} X1={res.mean_X1!r}")
    full = {**cfg, "threads": args.threads, "format": args.format}
    write_manifest(out, "simulate", full, outputs, seed=config.master_seed)
    return 0


def cmd_analytic(args) -> int:
    cfg = resolve(args, "analytic")
    if cfg["alpha"] is None or cfg["papers"] is None:
        raise ConfigError("--alpha and --papers are required")
    alpha, A = float(cfg["alpha"]), float(cfg["papers"])
    if not 0 < alpha < 1:
        raise ConfigError(f"alpha must lie in (0, 1) (rho = 1/(1 - alpha)), got {alpha!r}")
    if A < 1:
        raise ConfigError(f"papers must be >= 1, got {A!r}")
    T = alpha * A if cfg["journals"] is None else float(cfg["journals"])
    curve = assemble_curve(analytic_zone_params(alpha, A), T, A)
    zp, eg = curve.zone_params, curve.egghe
    summary = {"alpha": alpha, "rho": zp.rho, "A": A, "T": T, "y_m": zp.y_m, "T0": zp.T0,
               "T0_int": zp.T0_int, "A0": zp.A0, "X1": zp.X1, "k": zp.k, "a": eg.a, "b": eg.b,
               "shape": curve.shape.value}
    _print_table(list(summary.items()))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    outputs = [write_json(out / "analytic.json", {**summary, "curvature_signs": list(curve.signs)})]
    if args.format == "csv":
        outputs.append(write_curve_csv(out / "curve.csv", curve_rows(curve)))
    else:
        outputs.append(write_json(out / "curve.json",
                                  [{"r": r, "R": R, "zone": z} for r, R, z in curve_rows(curve)]))
    write_manifest(out, "analytic", {**cfg, "format": args.format}, outputs)
    return 0


def cmd_classify(args) -> int:
    if args.k is not None:
        if args.b is None or args.t0 is None:
            raise ConfigError("--k needs --b and --t0")
        zp = ZoneParams(alpha=float("nan"), rho=float("nan"), y_m=float("nan"), T0=args.t0,
                        A0=float("nan"), X1=float("nan"), k=args.k)
        egghe = EggheParams(a=float("nan"), b=args.b, A1=float("nan"), T1=float("nan"), y_m=float("nan"))
        signs = curvature_signs(zp, egghe)
    elif args.alpha is not None and args.papers is not None:
        A = float(args.papers)
        signs = assemble_curve(analytic_zone_params(args.alpha, A), args.alpha * A, A).signs
    else:
        raise ConfigError("give --k/--b/--t0 or --alpha/--papers")
    shape = classify(signs)
    if args.format == "json":
        print(json.dumps({"curvature_signs": list(signs), "shape": shape.value}))
    else:
        print(f"core_sign={signs[0]} normal_sign={signs[1]} shape={shape.value}")
    return 0


def cmd_forecast(args) -> int:
    entries = read_manifest(args.manifest)
    snaps = ingest_manifest(args.manifest)
    history = build_history(snaps)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        fc = forecast(history, args.t_star)
    for msg in fc.warnings:
        log.warning(msg)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    outputs = [write_json(out / "history.json", history.to_dict()),
               write_json(out / "forecast.json", fc.to_dict())]
    if args.format == "csv":
        outputs.append(write_curve_csv(out / "curve.csv", curve_rows(fc.curve)))
    else:
        outputs.append(write_json(out / "curve.json",
                                  [{"r": r, "R": R, "zone": z} for r, R, z in curve_rows(fc.curve)]))
    print(f"t*={fc.t_star!r} A={fc.A!r} T={fc.T!r} T0={fc.T0!r} A0={fc.A0!r} X1={fc.X1!r}")
    print(f"shape={fc.shape.value} extrapolated={str(fc.extrapolated).lower()}")
    inputs = {str(args.manifest): file_checksum(args.manifest)}
    inputs.update({str(p): file_checksum(p) for _, p in entries})
    write_manifest(out, "forecast", {"manifest": str(args.manifest), "t_star": args.t_star,
                                     "format": args.format}, outputs, inputs=inputs)
    return 0


def cmd_ingest_check(args) -> int:
    snap = analyze_snapshot(ingest_snapshot(args.file, args.t))
    _print_table([("T", snap.T), ("A", snap.A), ("alpha", snap.alpha), ("y_m", snap.y_m),
                  ("T0", snap.T0), ("A0", snap.A0), ("X1", snap.X1),
                  ("empty_core", snap.empty_core), ("sha256", snap.checksum)])
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="bradford_out", help="output directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--threads", type=int, default=1, help="replication worker cap")
    common.add_argument("--seed", type=lambda s: int(s, 0), default=None, help="64-bit master seed")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="bradford", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo ensemble")
    s.add_argument("--config", help="JSON file with simulate settings")
    s.add_argument("--alpha", type=float)
    s.add_argument("--alpha-start", type=float)
    s.add_argument("--alpha-end", type=float)
    s.add_argument("--gamma", type=float, help="decay factor (1 = no aging)")
    s.add_argument("--gamma-end", type=float, help="final decay factor of a linear schedule")
    s.add_argument("--papers", type=int)
    s.add_argument("--reps", type=int)
    s.add_argument("--checkpoints", type=int, nargs="+", help="paper counts to snapshot at")
    s.set_defaults(func=cmd_simulate)

    a = sub.add_parser("analytic", parents=[common], help="closed-form two-zone curve")
    a.add_argument("--config", help="JSON file with analytic settings")
    a.add_argument("--alpha", type=float)
    a.add_argument("--papers", type=float)
    a.add_argument("--journals", type=float, help="journal count (default alpha * papers)")
    a.set_defaults(func=cmd_analytic)

    c = sub.add_parser("classify", parents=[common], help="curve shape from curvature signs")
    c.add_argument("--k", type=float)
    c.add_argument("--b", type=float)
    c.add_argument("--t0", type=float)
    c.add_argument("--alpha", type=float)
    c.add_argument("--papers", type=float)
    c.set_defaults(func=cmd_classify)

    f = sub.add_parser("forecast", parents=[common], help="fit a history and forecast")
    f.add_argument("--manifest", required=True, help="CSV with t,path rows")
    f.add_argument("--t-star", type=float, required=True)
    f.set_defaults(func=cmd_forecast)

    i = sub.add_parser("ingest-check", parents=[common], help="validate one snapshot file")
    i.add_argument("file")
    i.add_argument("--t", type=float, default=0.0)
    i.set_defaults(func=cmd_ingest_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
