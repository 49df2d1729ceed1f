"""Command-line entry point.

Each subcommand reads only the inputs named in the config (or the default
artifact of an earlier stage under ``--out``) and writes its own artifact.
Failures print a JSON object to stderr and exit with 2 (config), 3 (missing
input) or 4 (schema).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import formats
from .aimsim import measure_ring, scene_to_scatterers
from .classify.dataset import LabeledDataset
from .classify.knn import KnnModel, predict_knn, train_knn
from .classify.serialize import model_from_dict, model_to_dict
from .classify.svm import grid_search_svm, predict_svm
from .classify.threshold import ThresholdModel, predict_threshold, train_threshold
from .config import RunConfig, load_config
from .dynarray import ring_points, rotation_schedule, sample_ring_from_visibility
from .errors import ConfigError, MissingInputError, RingsenseError, SchemaError
from .evaluate.montecarlo import DEFAULT_SPECS, ClassifierSpec, monte_carlo
from .evaluate.roc import sigma_contours
from .evaluate.ssim import ssim, unit_intensity
from .evaluate.timing import timing_report
from .features import extract, fit_normalizer, magnitude
from .synthetic import make_dataset
from .visibility import VisibilityGrid, forward_visibility, grid_ring_samples, inverse_reconstruct, psf

log = logging.getLogger("ringsense")

EXIT_OK, EXIT_CONFIG, EXIT_MISSING, EXIT_SCHEMA = 0, 2, 3, 4

ARTIFACTS = {
    "scene": "scene.mwgrid",
    "ring": "ring.csv",
    "dataset": "dataset.featcsv",
    "model": "model.json",
    "mc": "mc_report.csv",
    "reconstruction": "reconstruction.mwgrid",
    "psf": "psf.mwgrid",
    "ssim": "ssim.json",
    "timing": "timing.json",
    "roc": "roc.csv",
    "contours": "contours.json",
}
INFEASIBLE = "rotation rate {:.4g} rev/s exceeds {:.4g} rev/s: certain angles will be skipped"


def bundled_dataset(name: str) -> LabeledDataset:
    ref = resources.files("ringsense") / "data" / f"{name}.featcsv"
    if not ref.is_file():
        raise ConfigError(f"no bundled dataset named {name!r}")
    with resources.as_file(ref) as path:
        return formats.read_features(path)


def _out(cfg: RunConfig, key: str) -> Path:
    path = Path(cfg.out) / ARTIFACTS[key]
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _load_dataset(cfg: RunConfig) -> LabeledDataset:
    if "dataset" not in cfg.inputs and cfg.dataset.bundled:
        return bundled_dataset(cfg.dataset.bundled)
    return formats.read_features(cfg.input_path("dataset", ARTIFACTS["dataset"]))


# -- commands ----------------------------------------------------------------

def cmd_scene(cfg: RunConfig) -> list:
    scene = cfg.scene.build(cfg.geometry)
    path = _out(cfg, "scene")
    formats.write_grid(path, scene.values, scene.m_axis, scene.l_axis)
    return [path]


def measure(cfg: RunConfig, path_kind: str = "analytic"):
    sched = rotation_schedule(cfg.ring)
    if not sched.feasible:
        raise ConfigError(INFEASIBLE.format(cfg.ring.rotation_rate, sched.gamma_ring))
    scene = cfg.scene.build(cfg.geometry)
    if path_kind == "analytic":
        return sample_ring_from_visibility(ring_points(cfg.ring), forward_visibility(scene))
    if path_kind == "oracle":
        return measure_ring(cfg.with_noise(), scene_to_scatterers(scene), cfg.ring)
    raise ConfigError(f"unknown measurement path {path_kind!r}")


def cmd_measure(cfg: RunConfig, path_kind: str = "analytic") -> list:
    samples = measure(cfg, path_kind)
    path = _out(cfg, "ring")
    formats.write_ring(path, samples)
    return [path]


def cmd_dataset(cfg: RunConfig) -> list:
    dc = cfg.dataset
    if dc.rings:
        feats, labels, ids = [], [], []
        for entry in dc.rings:
            samples = formats.read_ring(entry["path"])
            feats.append(extract(samples).as_array())
            labels.append(entry["label"])
            ids.append(Path(entry["path"]).stem)
        x, y = np.array(feats), np.array(labels)
    elif dc.bundled:
        data = bundled_dataset(dc.bundled)
        x, y, ids = data.features, data.labels, data.source_id
    else:
        data = make_dataset(dc.phantom, dc.n_per_class, cfg.seed, dc.variant, cfg.ring)
        x, y, ids = data.features, data.labels, data.source_id
    path = _out(cfg, "dataset")
    formats.write_features(path, x, y, ids)
    return [path]


def train(spec: ClassifierSpec, data: LabeledDataset):
    """Fit the normaliser on all rows, then the chosen classifier."""
    norm = fit_normalizer(data.features)
    z = norm.transform(data.features)
    if spec.kind == "thr":
        model = train_threshold(magnitude(z), data.labels)
    elif spec.kind == "knn":
        model = train_knn(z, data.labels, spec.k)
    else:
        model = grid_search_svm(z, data.labels, spec.c_grid, spec.gamma_grid, spec.folds).model
    return model, norm


def predictor(model):
    """Label function on normalised feature rows."""
    if isinstance(model, ThresholdModel):
        return lambda z: predict_threshold(model, magnitude(z))
    if isinstance(model, KnnModel):
        return lambda z: predict_knn(model, z)
    return lambda z: predict_svm(model, z)


def cmd_train(cfg: RunConfig) -> list:
    model, norm = train(cfg.classifier, _load_dataset(cfg))
    path = _out(cfg, "model")
    formats.dump_json(path, model_to_dict(model, norm))
    return [path]


def cmd_eval(cfg: RunConfig, all_classifiers: bool = True) -> list:
    data = _load_dataset(cfg)
    specs = DEFAULT_SPECS if all_classifiers else (cfg.classifier,)
    report = monte_carlo(data, specs, cfg.iters, cfg.train_frac, cfg.seed)
    path = _out(cfg, "mc")
    formats.write_mc_report(path, report)
    return [path]


def cmd_reconstruct(cfg: RunConfig) -> list:
    samples = formats.read_ring(cfg.input_path("ring", ARTIFACTS["ring"]))
    scene = cfg.scene.build(cfg.geometry)
    target = VisibilityGrid.empty_like(forward_visibility(scene))
    sampled = grid_ring_samples(samples, target, hermitian=cfg.hermitian)
    rec = inverse_reconstruct(sampled)
    point = psf(sampled)
    p1, p2 = _out(cfg, "reconstruction"), _out(cfg, "psf")
    formats.write_grid(p1, rec.values, rec.m_axis, rec.l_axis)
    formats.write_grid(p2, point.values, point.m_axis, point.l_axis)
    return [p1, p2]


def cmd_ssim(cfg: RunConfig) -> list:
    ref, _, _ = formats.read_grid(cfg.input_path("reference", ARTIFACTS["scene"]))
    test, _, _ = formats.read_grid(cfg.input_path("test", ARTIFACTS["reconstruction"]))
    if np.iscomplexobj(ref) or np.iscomplexobj(test):
        raise SchemaError("SSIM needs real-valued grids", column="dtype")
    if ref.shape != test.shape:
        raise SchemaError(f"grid shapes differ: {ref.shape} vs {test.shape}", column="rows")
    path = _out(cfg, "ssim")
    formats.dump_json(path, {"format": "SSIM1", "ssim": ssim(unit_intensity(ref), unit_intensity(test))})
    return [path]


def cmd_report(cfg: RunConfig) -> list:
    """Per-stage timing plus per-iteration ROC points and their sigma contours."""
    model, norm = model_from_dict(formats.load_json(cfg.input_path("model", ARTIFACTS["model"]),
                                                    "RSMODEL1"))
    if norm is None:
        raise SchemaError("model file lacks a normalizer", column="normalizer")
    data = _load_dataset(cfg)
    timing = timing_report(cfg.scene.build(cfg.geometry), cfg.ring, norm, predictor(model),
                           cfg.timing_repetitions)
    p_timing = _out(cfg, "timing")
    formats.dump_json(p_timing, {"format": "TIMING1", **timing.to_dict()})
    report = monte_carlo(data, DEFAULT_SPECS, cfg.iters, cfg.train_frac, cfg.seed)
    p_roc = _out(cfg, "roc")
    formats.write_roc_points(p_roc, report)
    contours = {}
    for name in report.names:
        c = sigma_contours(report.points(name)) if report.iters >= 2 else None
        contours[name] = None if c is None else {
            "mean": c.mean, "cov": c.cov, "degenerate": c.degenerate,
            "semi_axes": {str(n): c.axes(n).T for n in (1, 2, 3)}}
    p_cont = _out(cfg, "contours")
    formats.dump_json(p_cont, {"format": "CONTOURS1", "classifiers": contours})
    return [p_timing, p_roc, p_cont]


def cmd_pipeline(cfg: RunConfig, path_kind: str = "analytic") -> list:
    out = []
    out += cmd_scene(cfg)
    out += cmd_measure(cfg, path_kind)
    out += cmd_dataset(cfg)
    out += cmd_train(cfg)
    out += cmd_eval(cfg)
    out += cmd_reconstruct(cfg)
    out += cmd_ssim(cfg)
    out += cmd_report(cfg)
    return out


COMMANDS = {
    "scene": cmd_scene, "measure": cmd_measure, "dataset": cmd_dataset, "train": cmd_train,
    "eval": cmd_eval, "reconstruct": cmd_reconstruct, "ssim": cmd_ssim, "report": cmd_report,
    "pipeline": cmd_pipeline,
}


# -- argument handling -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ringsense", description="Imageless ring-sampling detection pipeline")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="JSON run configuration")
        s.add_argument("--seed", type=int, help="master seed (overrides the config)")
        s.add_argument("--out", help="output directory (overrides the config)")
        s.add_argument("--path", choices=("analytic", "oracle"), default="analytic",
                       help="visibility sampling or noise-correlation simulation")
        s.add_argument("--classifier", choices=("thr", "knn", "svm"),
                       help="restrict train/eval to one classifier family")
        s.add_argument("--iters", type=int, help="Monte-Carlo iterations")
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("seed must be non-negative")
        noise = cfg.noise if cfg.noise is None else replace(cfg.noise, seed=args.seed)
        cfg = replace(cfg, seed=args.seed, noise=noise)
    if args.out is not None:
        cfg = replace(cfg, out=args.out)
    if args.iters is not None:
        if args.iters < 1:
            raise ConfigError("--iters must be >= 1")
        cfg = replace(cfg, iters=args.iters)
    if args.classifier is not None:
        cfg = replace(cfg, classifier=replace(cfg.classifier, kind=args.classifier))
    return cfg


def _fail(err: Exception, code: int) -> int:
    info = {"error": getattr(err, "kind", "internal"), "message": str(err)}
    if getattr(err, "column", None) is not None:
        info["column"] = err.column
    print(json.dumps(info), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        cmd = args.command
        if cmd in ("measure", "pipeline"):
            written = COMMANDS[cmd](cfg, args.path)
        elif cmd == "eval":
            written = cmd_eval(cfg, all_classifiers=args.classifier is None)
        else:
            written = COMMANDS[cmd](cfg)
    except MissingInputError as err:
        return _fail(err, EXIT_MISSING)
    except SchemaError as err:
        return _fail(err, EXIT_SCHEMA)
    except RingsenseError as err:
        return _fail(err, EXIT_CONFIG)
    for path in written:
        log.info("wrote %s", path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
