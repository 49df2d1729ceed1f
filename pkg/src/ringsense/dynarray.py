"""Static and rotating interferometric arrays.

A static layout samples one ``(u, v)`` point per antenna pair.  A two-element
pair rotating about its centroid traces a ring of radius ``D_lambda`` in the
``uv``-plane; the encoder index ``k`` (not wall-clock time) sets the angle
``gamma_k = gamma0 + k * step``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError, SampleRangeError, ShapeError
from .visibility import VisibilityGrid

ENCODER_STEP = math.radians(0.9)
REDUNDANCY_TOL = 1e-9


@dataclass(frozen=True)
class ArrayLayout:
    antenna_positions: tuple  # ((x, y), ...) in metres
    wavelength: float

    def __post_init__(self):
        pos = np.asarray(self.antenna_positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ShapeError("antenna positions must be (x, y) pairs")
        if len(pos) < 2:
            raise PreconditionError("an array needs at least 2 antennas")
        if not np.all(np.isfinite(pos)):
            raise DomainError("antenna positions must be finite")
        if len(np.unique(pos, axis=0)) != len(pos):
            raise DomainError("duplicate antenna positions")
        if not self.wavelength > 0:
            raise DomainError("wavelength must be positive")
        object.__setattr__(self, "antenna_positions", tuple(map(tuple, pos)))


@dataclass(frozen=True)
class StaticSamples:
    uv: np.ndarray  # (n_pairs, 2), one-sided (i < j)
    pairs: tuple
    redundant_flags: np.ndarray

    @property
    def total(self) -> int:
        return len(self.pairs)

    @property
    def unique(self) -> int:
        return int((~self.redundant_flags).sum())

    @property
    def redundant(self) -> int:
        return int(self.redundant_flags.sum())


def static_samples(layout: ArrayLayout) -> StaticSamples:
    """uv-points of every pair ``i < j``; later duplicates count as redundant."""
    pos = np.asarray(layout.antenna_positions)
    pairs, uv = [], []
    for i in range(len(pos)):
        for j in range(i + 1, len(pos)):
            pairs.append((i, j))
            uv.append((pos[j] - pos[i]) / layout.wavelength)
    uv = np.array(uv)
    flags = np.zeros(len(uv), dtype=bool)
    for n in range(1, len(uv)):
        if np.any(np.all(np.abs(uv[:n] - uv[n]) <= REDUNDANCY_TOL, axis=1)):
            flags[n] = True
    return StaticSamples(uv, tuple(pairs), flags)


@dataclass(frozen=True)
class RingConfig:
    """Rotating-pair acquisition settings.

    Angles in radians, ``dwell`` in seconds per encoder step and
    ``rotation_rate`` in revolutions per second.
    """

    baselines_lambda: tuple = (77.0,)
    gamma0: float = 0.0
    step: float = ENCODER_STEP
    span: float = math.pi
    dwell: float = 1e-3
    rotation_rate: float = 2.5

    def __post_init__(self):
        b = tuple(float(x) for x in np.atleast_1d(self.baselines_lambda))
        object.__setattr__(self, "baselines_lambda", b)
        if not b or min(b) <= 0:
            raise DomainError("baselines must be positive")
        if not (0 < self.step <= self.span):
            raise DomainError("need 0 < step <= span")
        if self.span > math.pi * (1 + 1e-12):
            raise DomainError("span beyond pi is redundant for a Hermitian visibility")
        if self.n_angles < 1:
            raise DomainError("ring needs at least one angle")
        if not self.dwell > 0:
            raise DomainError(f"dwell must be positive, got {self.dwell}")

    @property
    def n_angles(self) -> int:
        return int(round(self.span / self.step))


@dataclass(frozen=True)
class RingSampleSet:
    """Ordered ring samples; ``value`` is NaN until measured."""

    ring: np.ndarray
    k: np.ndarray
    gamma: np.ndarray
    u: np.ndarray
    v: np.ndarray
    value: np.ndarray
    baseline: np.ndarray

    def __post_init__(self):
        n = len(self.k)
        for name in ("ring", "gamma", "u", "v", "value", "baseline"):
            if len(getattr(self, name)) != n:
                raise ShapeError(f"field {name} has length {len(getattr(self, name))}, expected {n}")

    def __len__(self):
        return len(self.k)

    @property
    def has_values(self) -> bool:
        return bool(np.all(np.isfinite(self.value)))

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.value)

    def with_values(self, values) -> "RingSampleSet":
        values = np.asarray(values, dtype=complex)
        if values.shape != self.k.shape:
            raise ShapeError("value array length does not match the ring")
        return RingSampleSet(self.ring, self.k, self.gamma, self.u, self.v, values, self.baseline)

    def check(self, rtol: float = 1e-9):
        """Raise if any sample is off its circle or indices are not increasing."""
        radius = np.hypot(self.u, self.v)
        if np.any(np.abs(radius - self.baseline) > rtol * self.baseline):
            raise DomainError("ring sample off its circle")
        for r in np.unique(self.ring):
            ks = self.k[self.ring == r]
            if np.any(np.diff(ks) <= 0) or ks.min() < 0:
                raise DomainError(f"ring {r} indices not strictly increasing")


def ring_points(cfg: RingConfig) -> RingSampleSet:
    n = cfg.n_angles
    k = np.arange(n)
    gamma = cfg.gamma0 + k * cfg.step
    rings, ks, gammas, us, vs, bs = [], [], [], [], [], []
    for r, d in enumerate(cfg.baselines_lambda):
        rings.append(np.full(n, r))
        ks.append(k)
        gammas.append(gamma)
        us.append(d * np.sin(gamma))
        vs.append(d * np.cos(gamma))
        bs.append(np.full(n, d))
    total = n * len(cfg.baselines_lambda)
    return RingSampleSet(
        np.concatenate(rings), np.concatenate(ks), np.concatenate(gammas),
        np.concatenate(us), np.concatenate(vs),
        np.full(total, np.nan + 1j * np.nan), np.concatenate(bs),
    )


@dataclass(frozen=True)
class RotationSchedule:
    t_ring: float  # seconds per ring
    gamma_ring: float  # maximum rotation rate, rev/s
    feasible: bool


def rotation_schedule(cfg: RingConfig) -> RotationSchedule:
    if not cfg.dwell > 0:
        raise DomainError("dwell must be positive")
    t_ring = cfg.n_angles * cfg.dwell
    # the ring covers half a revolution
    gamma_ring = 0.5 / t_ring
    return RotationSchedule(t_ring, gamma_ring, cfg.rotation_rate <= gamma_ring)


def sample_ring_from_visibility(skeleton: RingSampleSet, vis: VisibilityGrid) -> RingSampleSet:
    """Bilinear interpolation of ``vis`` at every ring point."""
    fu = (skeleton.u - vis.u_axis[0]) / vis.du
    fv = (skeleton.v - vis.v_axis[0]) / vis.dv
    rows, cols = vis.shape
    eps = 1e-9
    bad = np.flatnonzero((fu < -eps) | (fu > cols - 1 + eps) | (fv < -eps) | (fv > rows - 1 + eps))
    if bad.size:
        k = int(skeleton.k[bad[0]])
        raise SampleRangeError(
            f"ring point k={k} at (u, v)=({skeleton.u[bad[0]]:.6g}, {skeleton.v[bad[0]]:.6g}) "
            "lies outside the visibility grid", k=k)
    fu = np.clip(fu, 0, cols - 1)
    fv = np.clip(fv, 0, rows - 1)
    j0 = np.minimum(np.floor(fu).astype(int), cols - 2)
    i0 = np.minimum(np.floor(fv).astype(int), rows - 2)
    tu = fu - j0
    tv = fv - i0
    g = vis.values
    value = ((1 - tu) * (1 - tv) * g[i0, j0] + tu * (1 - tv) * g[i0, j0 + 1]
             + (1 - tu) * tv * g[i0 + 1, j0] + tu * tv * g[i0 + 1, j0 + 1])
    return skeleton.with_values(value)


def baseline_lambda(separation_m: float, wavelength: float) -> float:
    return separation_m / wavelength
