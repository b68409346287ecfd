"""Command-line surface: run, sweep, and synth subcommands.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 I/O error. report.json is byte-deterministic for a fixed config and
seed; wall-clock timing goes to a separate metadata.json.
"""

from __future__ import annotations

import argparse
import dataclasses
import itertools
import json
import sys
import time
from pathlib import Path

import numpy as np

from .core import Hyperparams
from .data import (SyntheticConfig, generate_synthetic, load_source, load_target,
                   save_features)
from .exceptions import DaodError, InvalidInputError, NumericalError
from .metrics import open_set_metrics
from .osnn import label_targets
from .solver import daod_fit

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3

MODES = ("daod", "osnn-baseline")
_HP_FIELDS = {field.name for field in dataclasses.fields(Hyperparams)}
_SYNTH_FIELDS = {field.name for field in dataclasses.fields(SyntheticConfig)}


class ConfigError(InvalidInputError):
    """Bad CLI or config-file input."""


@dataclasses.dataclass
class RunConfig:
    """One run: mode, exactly one input (files xor synthetic), knobs, output."""

    mode: str = "daod"
    seed: int = 0
    source: str = None
    target: str = None
    target_truth: str = None
    synthetic: dict = None
    hyperparams: dict = dataclasses.field(default_factory=dict)
    out: str = "daod-out"

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        files = self.source is not None or self.target is not None
        if files and self.synthetic is not None:
            raise ConfigError("give either source/target files or a synthetic config, not both")
        if not files and self.synthetic is None:
            raise ConfigError("no input: set source+target paths or a synthetic config")
        if files and (self.source is None or self.target is None):
            raise ConfigError("file input needs both source and target paths")
        unknown = set(self.hyperparams) - _HP_FIELDS
        if unknown:
            raise ConfigError(f"unknown hyperparameter keys: {sorted(unknown)}")
        if self.synthetic is not None:
            bad = set(self.synthetic) - _SYNTH_FIELDS
            if bad:
                raise ConfigError(f"unknown synthetic config keys: {sorted(bad)}")


def _load_config_file(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return payload


def _run_config(args) -> RunConfig:
    payload = _load_config_file(args.config) if args.config else {}
    allowed = {f.name for f in dataclasses.fields(RunConfig)}
    bad = set(payload) - allowed
    if bad:
        raise ConfigError(f"unknown config keys: {sorted(bad)}")
    cfg = RunConfig(**payload)
    if getattr(args, "mode", None):
        cfg.mode = args.mode
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "source", None):
        cfg.source = args.source
    if getattr(args, "target", None):
        cfg.target = args.target
    if getattr(args, "truth", None):
        cfg.target_truth = args.truth
    if getattr(args, "synthetic", None):
        if args.synthetic == "default":
            cfg.synthetic = {}
        else:
            try:
                cfg.synthetic = json.loads(args.synthetic)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"--synthetic is neither 'default' nor valid JSON: {exc}") from exc
    if getattr(args, "out", None):
        cfg.out = args.out
    cfg.validate()
    return cfg


def _datasets(cfg: RunConfig):
    if cfg.synthetic is not None:
        synth = dict(cfg.synthetic)
        synth.setdefault("seed", cfg.seed)
        return generate_synthetic(SyntheticConfig(**synth))
    source = load_source(cfg.source)
    target = load_target(cfg.target, truth_path=cfg.target_truth)
    return source, target


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


def _metrics_payload(metrics):
    if metrics is None:
        return None
    return _jsonable({
        "acc_os": metrics.acc_os,
        "acc_os_star": metrics.acc_os_star,
        "per_class": [None if np.isnan(v) else float(v) for v in metrics.per_class],
        "confusion": metrics.confusion,
        "excluded_classes": metrics.excluded_classes,
    })


def _report_payload(cfg: RunConfig, report, metrics) -> dict:
    return _jsonable({
        "mode": cfg.mode,
        "seed": cfg.seed,
        "n_source": report.n_source,
        "n_target": report.n_target,
        "n_classes": report.n_classes,
        "hyperparams": dataclasses.asdict(report.hyperparams),
        "bandwidth": report.bandwidth,
        "mu_trace": report.mu_trace,
        "objective_trace": report.objective_trace,
        "pseudo_change_counts": report.pseudo_change_counts,
        "fallback_iterations": report.fallback_iterations,
        "risk_trace": [dataclasses.asdict(r) for r in report.risk_trace],
        "metrics": _metrics_payload(metrics),
    })


def _baseline_payload(cfg: RunConfig, source, target, assignment, metrics,
                      threshold) -> dict:
    return _jsonable({
        "mode": cfg.mode,
        "seed": cfg.seed,
        "n_source": source.n_samples,
        "n_target": target.n_samples,
        "n_classes": source.n_classes,
        "threshold": threshold,
        "unknown_count": int(np.count_nonzero(assignment.unknown_mask)),
        "metrics": _metrics_payload(metrics),
    })


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def _write_predictions(path: Path, labels) -> None:
    lines = ["# predicted label per target row; 1..C are known classes, C+1 = unknown"]
    lines.extend(str(int(v)) for v in labels)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _execute(cfg: RunConfig):
    """Fit per cfg and return (payload, predictions)."""
    source, target = _datasets(cfg)
    hp = Hyperparams(**cfg.hyperparams)
    truth = target.held_out_truth() if target.has_ground_truth else None
    if cfg.mode == "daod":
        report = daod_fit(source, target, hp)
        metrics = (open_set_metrics(report.predictions, truth)
                   if truth is not None else None)
        return _report_payload(cfg, report, metrics), report.predictions.labels
    assignment = label_targets(target, source, hp.threshold)
    metrics = open_set_metrics(assignment, truth) if truth is not None else None
    payload = _baseline_payload(cfg, source, target, assignment, metrics, hp.threshold)
    return payload, assignment.labels


def cmd_run(args) -> int:
    cfg = _run_config(args)
    out = Path(cfg.out)
    started = time.time()
    payload, predictions = _execute(cfg)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "report.json", payload)
    _write_predictions(out / "predictions.csv", predictions)
    _write_json(out / "metadata.json", {
        "created_unix": time.time(),
        "elapsed_seconds": time.time() - started,
    })
    return EXIT_OK


def _grid_points(grid) -> list:
    """Expand a grid spec into a list of parameter dicts.

    A JSON object of lists expands to the cartesian product; a JSON list of
    objects is taken as explicit points. The derived key "delta" resolves
    to gamma = alpha - delta.
    """
    if isinstance(grid, dict):
        if not grid:
            raise ConfigError("empty parameter grid")
        names = sorted(grid)
        for name in names:
            if not isinstance(grid[name], list) or not grid[name]:
                raise ConfigError(f"grid entry {name!r} must be a non-empty list")
        points = [dict(zip(names, combo))
                  for combo in itertools.product(*(grid[n] for n in names))]
    elif isinstance(grid, list):
        if not grid:
            raise ConfigError("empty parameter grid")
        if not all(isinstance(p, dict) for p in grid):
            raise ConfigError("a list grid must contain parameter objects")
        points = [dict(p) for p in grid]
    else:
        raise ConfigError("grid must be a JSON object of lists or a list of objects")
    for point in points:
        bad = set(point) - (_HP_FIELDS | {"delta"})
        if bad:
            raise ConfigError(f"unknown grid parameter(s): {sorted(bad)}")
    return points


def _resolve_point(base_hp: dict, point: dict) -> dict:
    resolved = dict(base_hp)
    resolved.update({k: v for k, v in point.items() if k != "delta"})
    if "delta" in point:
        alpha = resolved.get("alpha", Hyperparams().alpha)
        resolved["gamma"] = alpha - point["delta"]
    return resolved


def cmd_sweep(args) -> int:
    cfg = _run_config(args)
    grid_text = args.grid
    if Path(grid_text).exists():
        try:
            with open(grid_text, "r", encoding="utf-8") as handle:
                grid = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"grid file {grid_text} is not valid JSON: {exc}") from exc
    else:
        try:
            grid = json.loads(grid_text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--grid is neither a file nor valid JSON: {exc}") from exc
    points = _grid_points(grid)
    out = Path(args.out or cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    param_names = sorted({name for point in points for name in point})
    rows = []
    for index, point in enumerate(points):
        point_cfg = dataclasses.replace(
            cfg, hyperparams=_resolve_point(cfg.hyperparams, point),
            out=str(out / f"point_{index:03d}"))
        started = time.time()
        acc_os = acc_os_star = ""
        try:
            point_dir = Path(point_cfg.out)
            payload, predictions = _execute(point_cfg)
            point_dir.mkdir(parents=True, exist_ok=True)
            _write_json(point_dir / "report.json", payload)
            _write_predictions(point_dir / "predictions.csv", predictions)
            metrics = payload.get("metrics")
            if metrics:
                acc_os = format(metrics["acc_os"], ".6f")
                acc_os_star = format(metrics["acc_os_star"], ".6f")
            status = "ok"
        except DaodError as exc:
            status = "error: " + str(exc).replace(",", ";")
            print(f"sweep point {index} failed: {exc}", file=sys.stderr)
        seconds = time.time() - started
        cells = [str(point.get(name, "")) for name in param_names]
        rows.append(cells + [acc_os, acc_os_star, format(seconds, ".3f"), status])
    header = param_names + ["acc_os", "acc_os_star", "seconds", "status"]
    lines = [",".join(header)] + [",".join(row) for row in rows]
    (out / "summary.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_synth(args) -> int:
    payload = {}
    if args.config:
        payload = _load_config_file(args.config)
        bad = set(payload) - _SYNTH_FIELDS
        if bad:
            raise ConfigError(f"unknown synthetic config keys: {sorted(bad)}")
    if args.seed is not None:
        payload["seed"] = args.seed
    cfg = SyntheticConfig(**payload)
    source, target = generate_synthetic(cfg)
    out = Path(args.out or "daod-synth")
    out.mkdir(parents=True, exist_ok=True)
    save_features(out / "source.csv", source.features, labels=source.labels)
    save_features(out / "target.csv", target.features)
    save_features(out / "target_truth.csv",
                  target.held_out_truth().reshape(-1, 1).astype(float))
    _write_json(out / "synthetic_config.json", dataclasses.asdict(cfg))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="daod",
        description="Open set domain adaptation: fit, sweep, and synthesize benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="fit one dataset and write report files")
    run.add_argument("--config", help="JSON run config; flags override its values")
    run.add_argument("--mode", choices=MODES)
    run.add_argument("--seed", type=int)
    run.add_argument("--source", help="labelled source feature file")
    run.add_argument("--target", help="unlabeled target feature file")
    run.add_argument("--truth", help="optional held-out target labels (evaluation only)")
    run.add_argument("--synthetic",
                     help="inline synthetic config as JSON, or 'default'")
    run.add_argument("--out", help="output directory")
    run.set_defaults(handler=cmd_run)

    sweep = sub.add_parser("sweep", help="run a hyperparameter grid and summarize")
    for flag_parser in (sweep,):
        flag_parser.add_argument("--config")
        flag_parser.add_argument("--mode", choices=MODES)
        flag_parser.add_argument("--seed", type=int)
        flag_parser.add_argument("--source")
        flag_parser.add_argument("--target")
        flag_parser.add_argument("--truth")
        flag_parser.add_argument("--synthetic")
        flag_parser.add_argument("--out")
    sweep.add_argument("--grid", required=True,
                       help="JSON grid: object of lists (cartesian product) or list of "
                            "point objects; 'delta' resolves to gamma = alpha - delta")
    sweep.set_defaults(handler=cmd_sweep)

    synth = sub.add_parser("synth", help="emit a synthetic dataset to files")
    synth.add_argument("--config", help="JSON synthetic config file")
    synth.add_argument("--seed", type=int)
    synth.add_argument("--out")
    synth.set_defaults(handler=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, InvalidInputError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DaodError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
