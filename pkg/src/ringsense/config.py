"""Run configuration loaded from JSON.

Every section is optional and falls back to the defaults below.  Angles in
the ``ring`` section are given in degrees.  Unknown keys are rejected so
that a typo cannot silently fall back to a default.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from .aimsim import NoiseSimConfig, emitter_circle
from .dynarray import RingConfig
from .errors import ConfigError, MissingInputError, RingsenseError
from .evaluate.montecarlo import ClassifierSpec
from .scene import (DEFAULT_EXTENT, DEFAULT_GRID, TARGET_AMPLITUDE, GeometryContext, SceneIntensity,
                    ShapeSpec, gun_shape, make_scene)
from .synthetic import PhantomConfig, config_from_dict, variant

CLASSIFIER_KINDS = ("thr", "knn", "svm")


def _check_keys(section: str, d, allowed):
    if not isinstance(d, dict):
        raise ConfigError(f"section {section!r} must be an object")
    extra = set(d) - set(allowed)
    if extra:
        raise ConfigError(f"unknown keys in {section!r}: {sorted(extra)}")


@dataclass(frozen=True)
class SceneConfig:
    """Shapes on a grid.  ``preset`` adds ``gun`` or ``two_point`` content."""

    rows: int = DEFAULT_GRID
    cols: int = DEFAULT_GRID
    l_extent: float = DEFAULT_EXTENT
    m_extent: float = DEFAULT_EXTENT
    preset: str | None = "gun"
    orientation: float = 0.0  # gun rotation, radians
    amplitude: float = TARGET_AMPLITUDE
    l0: float = 0.05  # half separation of the two-point preset
    shapes: tuple = ()

    def __post_init__(self):
        if self.preset not in (None, "gun", "two_point"):
            raise ConfigError(f"unknown scene preset {self.preset!r}")

    def build(self, ctx: GeometryContext) -> SceneIntensity:
        shapes = list(self.shapes)
        if self.preset == "gun":
            shapes.append(gun_shape(ctx, self.orientation, amplitude=self.amplitude))
        elif self.preset == "two_point":
            shapes += [ShapeSpec("point", 1.0, center=(s * self.l0, 0.0)) for s in (1, -1)]
        return make_scene(self.rows, self.cols, self.l_extent, self.m_extent, shapes)

    @classmethod
    def from_dict(cls, d: dict) -> "SceneConfig":
        names = {f.name for f in fields(cls)}
        _check_keys("scene", d, names)
        kw = dict(d)
        if "shapes" in kw:
            kw["shapes"] = tuple(ShapeSpec.from_dict(s) for s in kw["shapes"])
        return cls(**kw)


def ring_from_dict(d: dict) -> RingConfig:
    _check_keys("ring", d, {"baselines_lambda", "gamma0_deg", "step_deg", "span_deg", "dwell",
                            "rotation_rate"})
    kw = {}
    if "baselines_lambda" in d:
        kw["baselines_lambda"] = tuple(d["baselines_lambda"])
    for key in ("gamma0", "step", "span"):
        if key + "_deg" in d:
            kw[key] = math.radians(float(d[key + "_deg"]))
    for key in ("dwell", "rotation_rate"):
        if key in d:
            kw[key] = float(d[key])
    return RingConfig(**kw)


def noise_from_dict(d: dict, seed: int) -> NoiseSimConfig:
    names = {f.name for f in fields(NoiseSimConfig)}
    _check_keys("noise", d, names | {"emitters"})
    kw = {k: v for k, v in d.items() if k != "emitters"}
    if "emitters" in d:
        e = d["emitters"]
        _check_keys("noise.emitters", e, {"count", "radius"})
        kw["tx_positions"] = emitter_circle(int(e.get("count", 32)), float(e.get("radius", 0.3)))
    for key in ("tx_positions", "rx_positions"):
        if key in kw:
            kw[key] = tuple(tuple(p) for p in kw[key])
    kw.setdefault("seed", seed)
    return NoiseSimConfig(**kw)


@dataclass(frozen=True)
class DatasetConfig:
    """Either a synthetic phantom set or imported ring files.

    ``rings`` lists ``{"path": ..., "label": 0|1}`` entries; when present the
    phantom settings are ignored.  ``bundled`` names a packaged feature set.
    """

    variant: str = "jittered"
    n_per_class: int = 80
    phantom: PhantomConfig = field(default_factory=PhantomConfig)
    rings: tuple = ()
    bundled: str | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetConfig":
        _check_keys("dataset", d, {"variant", "n_per_class", "phantom", "rings", "bundled"})
        name = d.get("variant", "jittered")
        phantom = config_from_dict(d.get("phantom", {}), variant(name))
        rings = tuple(d.get("rings", ()))
        for r in rings:
            _check_keys("dataset.rings", r, {"path", "label"})
            if "path" not in r or r.get("label") not in (0, 1):
                raise ConfigError("each ring entry needs a path and a 0/1 label")
        return cls(name, int(d.get("n_per_class", 80)), phantom, rings, d.get("bundled"))


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    out: str = "out"
    geometry: GeometryContext = field(default_factory=GeometryContext)
    scene: SceneConfig = field(default_factory=SceneConfig)
    ring: RingConfig = field(default_factory=RingConfig)
    noise: NoiseSimConfig | None = None
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    classifier: ClassifierSpec = field(default_factory=lambda: ClassifierSpec("svm"))
    iters: int = 500
    train_frac: float = 0.7
    hermitian: bool = False
    timing_repetitions: int = 20
    inputs: dict = field(default_factory=dict)

    def input_path(self, name: str, default: str) -> Path:
        return Path(self.inputs.get(name, Path(self.out) / default))

    def with_noise(self) -> NoiseSimConfig:
        return self.noise if self.noise is not None else NoiseSimConfig(seed=self.seed)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        _check_keys("config", d, {"seed", "out", "geometry", "scene", "ring", "noise", "dataset",
                                  "classifier", "evaluate", "timing", "reconstruct", "inputs"})
        try:
            seed = int(d.get("seed", 0))
            if seed < 0:
                raise ConfigError("seed must be a non-negative integer")
            geo = d.get("geometry", {})
            _check_keys("geometry", geo, {"range_m", "frequency"})
            clf = d.get("classifier", {"kind": "svm"})
            _check_keys("classifier", clf, {"kind", "k", "n_votes", "folds"})
            if clf.get("kind", "svm") not in CLASSIFIER_KINDS:
                raise ConfigError(f"classifier kind must be one of {CLASSIFIER_KINDS}")
            ev = d.get("evaluate", {})
            _check_keys("evaluate", ev, {"iters", "train_frac"})
            tim = d.get("timing", {})
            _check_keys("timing", tim, {"repetitions"})
            rec = d.get("reconstruct", {})
            _check_keys("reconstruct", rec, {"hermitian"})
            inputs = d.get("inputs", {})
            _check_keys("inputs", inputs, {"ring", "dataset", "model", "reference", "test"})
            return cls(
                seed=seed,
                out=str(d.get("out", "out")),
                geometry=GeometryContext(**geo),
                scene=SceneConfig.from_dict(d.get("scene", {})),
                ring=ring_from_dict(d.get("ring", {})),
                noise=noise_from_dict(d["noise"], seed) if "noise" in d else None,
                dataset=DatasetConfig.from_dict(d.get("dataset", {})),
                classifier=ClassifierSpec(clf.get("kind", "svm"), int(clf.get("k", 11)),
                                          int(clf.get("n_votes", 1)), folds=clf.get("folds", 3)),
                iters=int(ev.get("iters", 500)),
                train_frac=float(ev.get("train_frac", 0.7)),
                hermitian=bool(rec.get("hermitian", False)),
                timing_repetitions=int(tim.get("repetitions", 20)),
                inputs=dict(inputs),
            )
        except ConfigError:
            raise
        except (RingsenseError, TypeError, ValueError) as err:
            raise ConfigError(f"invalid configuration: {err}") from err


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise MissingInputError(f"config file not found: {path}")
    try:
        d = json.loads(path.read_text())
    except json.JSONDecodeError as err:
        raise ConfigError(f"malformed JSON in {path}: {err}") from err
    return RunConfig.from_dict(d)
