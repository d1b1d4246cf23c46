"""Batch command line: simulate, train, evaluate, export-map.

Exit codes: 0 success, 2 usage/config error, 3 I/O error, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import capon
from .config import RadarConfig
from .dataset import generate, load_manifest, process_frame
from .errors import (ConfigError, DatasetError, NotPositiveDefiniteError, SceneError,
                     StratificationError)
from .pipeline import (DEFAULT_FOLDS, DEFAULT_VARIANCE_TARGET, ClassifierBundle,
                       evaluate_bundle, train)
from .scene import CabinGeometry, Scene, synthesize

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4


class UsageError(Exception):
    pass


class StageLog:
    """One JSON object per stage on stderr when enabled."""

    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.t0 = self.last = time.perf_counter()

    def __call__(self, stage, **outputs):
        now = time.perf_counter()
        if self.enabled:
            rec = {"stage": stage, "wall_time": round(now - self.last, 6), **outputs}
            print(json.dumps(rec, default=float), file=sys.stderr)
        self.last = now


def _load_config(path):
    if path is None:
        return RadarConfig()
    try:
        return RadarConfig.load(path)
    except (FileNotFoundError, IsADirectoryError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc


def cmd_simulate(args, log):
    if args.per_class < 1:
        raise UsageError(f"--per-class must be >= 1, got {args.per_class}")
    config = _load_config(args.config)
    geometry = CabinGeometry.load(args.geometry) if args.geometry else CabinGeometry()
    log("config", config_hash=config.hash(), geometry_hash=geometry.hash())
    manifest = generate(config, geometry, args.per_class, args.seed, args.out)
    log("generate", items=len(manifest), map_shape=list(manifest.map_shape))
    print(f"wrote {len(manifest)} maps to {args.out}")
    for name, n in manifest.counts.items():
        print(f"  {name:<7} {n}")
    return EXIT_OK


def cmd_train(args, log):
    if args.folds < 2:
        raise UsageError(f"--folds must be >= 2, got {args.folds}")
    if not 0 < args.variance_target <= 1:
        raise UsageError("--variance-target must lie in (0, 1]")
    manifest = load_manifest(args.data)
    log("load", items=len(manifest))
    bundle = train(manifest, args.variance_target, args.folds, args.seed, log=log)
    bundle.save(args.model_out)
    log("save", model_hash=bundle.hash())
    print(f"best C={bundle.svm.C:g} gamma={bundle.svm.kernel.gamma:.6g} "
          f"cv_accuracy={bundle.cv_score:.4f} ({args.folds}-fold)")
    print(f"pca components: {bundle.pca.n_components}; model written to {args.model_out}")
    return EXIT_OK


def cmd_evaluate(args, log):
    model_path = Path(args.model)
    if not model_path.is_file():
        raise FileNotFoundError(f"model file not found: {model_path}")
    bundle = ClassifierBundle.load(model_path)
    manifest = load_manifest(args.data)
    if manifest.config_hash != bundle.dataset_config_hash:
        print("warning: dataset config differs from the one the model was trained on",
              file=sys.stderr)
    cm = evaluate_bundle(bundle, manifest)
    log("evaluate", accuracy=cm.accuracy, binary_accuracy=cm.binary_accuracy)
    out = Path(args.report_out)
    out.mkdir(parents=True, exist_ok=True)
    cm.to_csv(out / "confusion.csv")
    (out / "confusion.txt").write_text(cm.to_text() + "\n")
    (out / "report.json").write_text(json.dumps({
        "accuracy": cm.accuracy,
        "occupied_vs_empty_accuracy": cm.binary_accuracy,
        "n_test": cm.total,
        "confusion": cm.counts.tolist(),
    }, indent=2) + "\n")
    print(cm.to_text())
    return EXIT_OK


def cmd_export_map(args, log):
    config = _load_config(args.config)
    try:
        scene = Scene.load(args.scene)
    except (FileNotFoundError, IsADirectoryError):
        raise
    cube = synthesize(scene, config)
    ra = process_frame(cube, args.window, args.loading)
    log("map", shape=list(ra.shape), peak=float(ra.values.max()))
    if args.out_csv:
        capon.export_csv(ra, args.out_csv)
    if args.out_pgm:
        capon.export_pgm(ra, args.out_pgm)
    print(f"map {ra.shape[0]}x{ra.shape[1]} (range bins x angles)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="occupancy-radar",
                                description="In-cabin occupancy detection with FMCW radar.")
    p.add_argument("--log-json", action="store_true",
                   help="emit one JSON record per stage on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="generate a labelled synthetic dataset")
    s.add_argument("--config", help="radar config JSON (SI units)")
    s.add_argument("--geometry", help="cabin geometry JSON")
    s.add_argument("--per-class", type=int, default=50)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True, help="output dataset directory")
    s.set_defaults(func=cmd_simulate)

    t = sub.add_parser("train", help="fit PCA + SVM with grid search on the 80%% split")
    t.add_argument("--data", required=True)
    t.add_argument("--variance-target", type=float, default=DEFAULT_VARIANCE_TARGET)
    t.add_argument("--folds", type=int, default=DEFAULT_FOLDS)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--model-out", required=True)
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("evaluate", help="confusion matrix on the held-out 20%%")
    e.add_argument("--data", required=True)
    e.add_argument("--model", required=True)
    e.add_argument("--report-out", required=True, help="report directory")
    e.set_defaults(func=cmd_evaluate)

    x = sub.add_parser("export-map", help="render one scene's range-azimuth map")
    x.add_argument("--scene", required=True)
    x.add_argument("--config")
    x.add_argument("--out-csv")
    x.add_argument("--out-pgm")
    x.add_argument("--window", default="hann", choices=["rectangular", "hann", "hamming"])
    x.add_argument("--loading", type=float, default=capon.DEFAULT_LOADING)
    x.set_defaults(func=cmd_export_map)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    log = StageLog(args.log_json)
    try:
        return args.func(args, log)
    except (UsageError, ConfigError, SceneError, StratificationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, DatasetError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NotPositiveDefiniteError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
