"""Person and person-with-gun phantoms measured along the ring.

A phantom is a blurred torso-and-head silhouette with speckle-like texture.
In the positive class a metallic gun outline replaces the body return where
it overlaps and adds its own stronger return.  A measurement takes
``segments`` snapshots, each covering a contiguous block of ring angles.
Between snapshots the subject breathes, the texture decorrelates and the gun
wobbles, which emulates a person moving during one ring.  The "static"
variant has a single snapshot and no motion.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy.ndimage import gaussian_filter

from .classify.dataset import LabeledDataset
from .dynarray import RingConfig, ring_points, sample_ring_from_visibility
from .errors import ConfigError
from .features import feature_matrix
from .scene import (GeometryContext, SceneIntensity, ShapeSpec, centered_axis, ellipse_polygon,
                    gun_shape, make_scene)
from .visibility import forward_visibility

TORSO = (0.11, 0.16)  # semi-axes, direction cosines
HEAD = (0.055, 0.06)
HEAD_OFFSET = 0.21


@dataclass(frozen=True)
class PhantomConfig:
    grid: int = 256
    extent: float = 0.25
    segments: int = 12
    gain_range: tuple = (0.3, 3.0)  # per-measurement log-uniform gain
    size_jitter: float = 0.1  # torso scale drawn from 1 +- size_jitter
    center_sigma: float = 0.01
    gun_offset: float = 0.05  # gun centre uniform within +-gun_offset of the body centre
    gun_amplitude: float = 2.6
    texture: float = 0.2
    blur: float = 0.006  # Gaussian blur sigma of the body, direction cosines
    breathing: float = 0.02  # per-snapshot relative scale sigma
    gun_shift: float = 0.003  # per-snapshot gun displacement sigma
    gun_tilt: float = 0.5  # per-snapshot gun rotation sigma, radians

    def __post_init__(self):
        if self.segments < 1 or self.grid < 8:
            raise ConfigError("need segments >= 1 and grid >= 8")
        lo, hi = self.gain_range
        if not 0 < lo <= hi:
            raise ConfigError("gain_range must satisfy 0 < low <= high")
        object.__setattr__(self, "gain_range", (float(lo), float(hi)))


VARIANTS = {
    "jittered": PhantomConfig(),
    "static": PhantomConfig(segments=1, breathing=0.0, gun_shift=0.0, gun_tilt=0.0),
}


def variant(name: str) -> PhantomConfig:
    try:
        return VARIANTS[name]
    except KeyError:
        raise ConfigError(f"unknown phantom variant {name!r}") from None


def measurement_rng(seed: int, label: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(label), int(index)]))


def _snapshot(cfg, rng, axis, body_shapes, gun):
    n = cfg.grid
    body = make_scene(n, n, cfg.extent, cfg.extent, body_shapes).values
    body = gaussian_filter(body, cfg.blur / (axis[1] - axis[0]))
    body = body * np.clip(1 + cfg.texture * rng.standard_normal(body.shape), 0, None)
    if gun is not None:
        mask = make_scene(n, n, cfg.extent, cfg.extent, [gun]).values
        body = body * (1 - mask) + cfg.gun_amplitude * mask
    return SceneIntensity(body, axis, axis)


def phantom_ring(cfg: PhantomConfig, rng: np.random.Generator, concealed: bool,
                 ring: RingConfig | None = None, ctx: GeometryContext | None = None) -> np.ndarray:
    """Complex ring samples of one simulated measurement."""
    ring = ring or RingConfig()
    ctx = ctx or GeometryContext()
    skel = ring_points(ring)
    axis = centered_axis(cfg.grid, cfg.extent)
    gain = np.exp(rng.uniform(*np.log(cfg.gain_range)))
    cx, cy = rng.normal(0, cfg.center_sigma, 2)
    sx, sy = np.array(TORSO) * rng.uniform(1 - cfg.size_jitter, 1 + cfg.size_jitter, 2)
    gun_pos = np.array([cx, cy]) + rng.uniform(-cfg.gun_offset, cfg.gun_offset, 2)
    gun_angle = rng.uniform(0, 2 * np.pi)
    values = np.empty(len(skel), dtype=complex)
    for block in np.array_split(np.arange(len(skel)), cfg.segments):
        b = 1 + cfg.breathing * rng.normal()
        shapes = [
            ShapeSpec("polygon", vertices=ellipse_polygon((cx, cy), (sx * b, sy * b), 48)),
            ShapeSpec("polygon", vertices=ellipse_polygon((cx, cy + HEAD_OFFSET), HEAD, 32)),
        ]
        gun = None
        if concealed:
            d = rng.normal(0, cfg.gun_shift, 2)
            gun = gun_shape(ctx, gun_angle + rng.normal(0, cfg.gun_tilt), center=tuple(gun_pos + d),
                            amplitude=1.0)
        scene = _snapshot(cfg, rng, axis, shapes, gun)
        values[block] = sample_ring_from_visibility(skel, forward_visibility(scene)).value[block]
    return values * gain


def make_dataset(cfg: PhantomConfig, n_per_class: int = 80, seed: int = 0, name: str = "phantom",
                 ring: RingConfig | None = None) -> LabeledDataset:
    """Raw 11-feature rows, alternating clear and concealed measurements."""
    mags, labels, ids = [], [], []
    for i in range(n_per_class):
        for label in (0, 1):
            z = phantom_ring(cfg, measurement_rng(seed, label, i), bool(label), ring)
            mags.append(np.abs(z))
            labels.append(label)
            ids.append(f"{name}-{label}-{i:03d}")
    return LabeledDataset(feature_matrix(np.array(mags)), np.array(labels), tuple(ids))


def config_to_dict(cfg: PhantomConfig) -> dict:
    return asdict(cfg)


def config_from_dict(d: dict, base: PhantomConfig | None = None) -> PhantomConfig:
    base = base or PhantomConfig()
    unknown = set(d) - set(asdict(base))
    if unknown:
        raise ConfigError(f"unknown phantom settings: {sorted(unknown)}")
    d = dict(d)
    if "gain_range" in d:
        d["gain_range"] = tuple(d["gain_range"])
    return replace(base, **d)
