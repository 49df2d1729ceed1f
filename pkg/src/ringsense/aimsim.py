"""Signal-level model of active incoherent illumination.

Noise transmitters illuminate a set of point scatterers and two receivers on
a rotating arm record the scattered field.  Cross-correlating the two
receiver series estimates one visibility sample per arm angle.

The model is narrowband: geometric path differences only shift the carrier
phase.  A scatterer at direction cosines ``(l, m)`` seen from an antenna at
``(x, y)`` in the array plane picks up ``exp(j k (x l + y m))``.  Because the
mixing is linear, the band-limiting filter is applied after combining the
white transmitter sources, which keeps the cost independent of the number of
scatterers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import firwin, oaconvolve

from .dynarray import RingConfig, RingSampleSet, ring_points
from .errors import ConfigError, DomainError, PreconditionError
from .scene import SPEED_OF_LIGHT, SceneIntensity

FILTER_TAPS = 129


def _rx_default() -> tuple:
    half = 0.5 * 77.0 * SPEED_OF_LIGHT / 75e9
    return ((0.0, half), (0.0, -half))


def emitter_circle(n: int, radius: float, phase: float = 0.1) -> tuple:
    """``n`` transmitter positions evenly spread on a circle about the arm centre."""
    if n < 1 or not radius > 0:
        raise DomainError("need n >= 1 and a positive radius")
    a = phase + 2 * np.pi * np.arange(n) / n
    return tuple(zip(radius * np.cos(a), radius * np.sin(a)))


@dataclass(frozen=True)
class NoiseSimConfig:
    """Transmitter/receiver geometry (metres, arm frame at angle 0) and noise settings.

    ``check_geometry`` enforces at least two transmitters placed outside the
    receive baseline; switch it off only for deliberately coherent controls.
    """

    tx_positions: tuple = ((0.0, 0.3), (0.0, -0.3))
    rx_positions: tuple = _rx_default()
    carrier: float = 75e9
    noise_bandwidth: float = 1e9
    sample_rate: float = 2e9
    n_samples: int = 100_000
    snr_db: float = 30.0
    seed: int = 0
    phase_offset: float = 0.0
    check_geometry: bool = True

    def __post_init__(self):
        tx = np.asarray(self.tx_positions, dtype=float)
        rx = np.asarray(self.rx_positions, dtype=float)
        if tx.ndim != 2 or tx.shape[1] != 2 or len(tx) < 1:
            raise ConfigError("tx_positions must be a list of (x, y) pairs")
        if rx.shape != (2, 2):
            raise ConfigError("exactly two receivers are required")
        if not (np.all(np.isfinite(tx)) and np.all(np.isfinite(rx))):
            raise ConfigError("antenna positions must be finite")
        if not (self.carrier > 0 and self.noise_bandwidth > 0):
            raise ConfigError("carrier and noise bandwidth must be positive")
        if self.sample_rate < 2 * self.noise_bandwidth:
            raise ConfigError("sample_rate must be at least twice the noise bandwidth")
        if int(self.n_samples) < 1:
            raise ConfigError("n_samples must be >= 1")
        if not math.isfinite(self.snr_db):
            raise ConfigError("snr_db must be finite")
        if self.check_geometry:
            if len(tx) < 2:
                raise ConfigError("at least two transmitters are required")
            centre = rx.mean(axis=0)
            reach = np.linalg.norm(rx - centre, axis=1).max()
            if np.any(np.linalg.norm(tx - centre, axis=1) <= reach):
                raise ConfigError("transmitters must sit outside the receive baseline")
        object.__setattr__(self, "tx_positions", tuple(map(tuple, tx)))
        object.__setattr__(self, "rx_positions", tuple(map(tuple, rx)))
        object.__setattr__(self, "n_samples", int(self.n_samples))

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier

    @property
    def baseline_lambda(self) -> float:
        rx = np.asarray(self.rx_positions)
        return float(np.linalg.norm(rx[0] - rx[1]) / self.wavelength)


@dataclass(frozen=True)
class ScattererSet:
    l: np.ndarray
    m: np.ndarray
    reflectivity: np.ndarray

    def __post_init__(self):
        arrs = [np.atleast_1d(np.asarray(a, dtype=float)) for a in (self.l, self.m, self.reflectivity)]
        if len({a.shape for a in arrs}) != 1 or arrs[0].ndim != 1:
            raise PreconditionError("l, m and reflectivity must be equal-length vectors")
        l, m, r = arrs
        if np.any(np.abs(l) > 1) or np.any(np.abs(m) > 1):
            raise DomainError("scatterer direction cosines must lie in [-1, 1]")
        if not np.all(np.isfinite(r)) or np.any(r < 0):
            raise DomainError("reflectivity must be finite and non-negative")
        for name, a in zip(("l", "m", "reflectivity"), arrs):
            object.__setattr__(self, name, a)

    def __len__(self):
        return len(self.l)

    @classmethod
    def empty(cls) -> "ScattererSet":
        return cls(np.empty(0), np.empty(0), np.empty(0))

    @classmethod
    def from_points(cls, points) -> "ScattererSet":
        pts = np.asarray(points, dtype=float).reshape(-1, 3)
        return cls(pts[:, 0], pts[:, 1], pts[:, 2])


def scene_to_scatterers(scene: SceneIntensity) -> ScattererSet:
    """One scatterer per non-zero pixel with reflectivity ``I * dl * dm``.

    With this weighting the expected correlation equals the gridded forward
    visibility of the same scene.
    """
    rows, cols = np.nonzero(scene.values)
    weight = scene.values[rows, cols] * scene.dl * scene.dm
    return ScattererSet(scene.l_axis[cols], scene.m_axis[rows], weight)


def _rotate(p: np.ndarray, gamma: float) -> np.ndarray:
    # clockwise by gamma, so a pair along +y turns towards +x
    c, s = math.cos(gamma), math.sin(gamma)
    return np.column_stack([p[:, 0] * c + p[:, 1] * s, -p[:, 0] * s + p[:, 1] * c])


def lowpass_taps(cfg: NoiseSimConfig) -> np.ndarray:
    """Hamming-windowed sinc for a complex band of width ``noise_bandwidth``, unit power gain."""
    nyq = cfg.sample_rate / 2
    cutoff = min(cfg.noise_bandwidth / 2 / nyq, 1.0)
    if cutoff >= 1.0:
        return np.ones(1)
    taps = firwin(FILTER_TAPS, cutoff)
    return taps / np.sqrt(np.sum(taps**2))


def dwell_rng(seed: int, k: int) -> np.random.Generator:
    """Independent stream for dwell ``k``; the same for serial and parallel runs."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(k)]))


def _complex_noise(rng, shape) -> np.ndarray:
    z = rng.standard_normal(shape + (2,))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)


def steering(cfg: NoiseSimConfig, scatterers: ScattererSet, gamma: float) -> np.ndarray:
    """(2, n_tx) gains from each transmitter to each receiver via all scatterers."""
    k = 2 * np.pi / cfg.wavelength
    tx = _rotate(np.asarray(cfg.tx_positions), gamma)
    rx = _rotate(np.asarray(cfg.rx_positions), gamma)
    if len(scatterers) == 0:
        return np.zeros((2, len(tx)), dtype=complex)
    dirs = np.vstack([scatterers.l, scatterers.m])
    amp = np.sqrt(scatterers.reflectivity)
    tx_phase = np.exp(1j * k * (tx @ dirs))  # (T, S)
    rx_phase = np.exp(1j * k * (rx @ dirs)) * amp  # (2, S)
    h = rx_phase @ tx_phase.T / np.sqrt(len(tx))
    h[1] *= np.exp(1j * cfg.phase_offset)
    return h


def simulate_dwell(cfg: NoiseSimConfig, scatterers: ScattererSet, gamma: float,
                   k: int = 0) -> tuple:
    """Complex baseband series of both receivers with the arm at ``gamma``.

    Each transmitter radiates its own band-limited noise of power ``1/n_tx``.
    Receiver noise is white, scaled to ``snr_db`` below the expected signal
    power of that receiver (unit power when there is no signal).
    """
    rng = dwell_rng(cfg.seed, k)
    n = cfg.n_samples
    h = steering(cfg, scatterers, gamma)
    taps = lowpass_taps(cfg)
    white = _complex_noise(rng, (h.shape[1], n + len(taps) - 1))
    mixed = h @ white
    signal = np.vstack([oaconvolve(row, taps, mode="valid") for row in mixed])
    power = np.sum(np.abs(h) ** 2, axis=1)
    noise_power = np.where(power > 0, power * 10 ** (-cfg.snr_db / 10), 1.0)
    noise = _complex_noise(rng, (2, n)) * np.sqrt(noise_power)[:, None]
    out = signal + noise
    return out[0], out[1]


def correlate(rx1, rx2) -> complex:
    a = np.asarray(rx1)
    b = np.asarray(rx2)
    if a.shape != b.shape or a.ndim != 1 or a.size < 1:
        raise PreconditionError("correlate needs two equal-length, non-empty series")
    return complex(np.vdot(b, a) / a.size)


def measure_ring(cfg: NoiseSimConfig, scatterers: ScattererSet,
                 ring: RingConfig | None = None) -> RingSampleSet:
    """Correlate one dwell per encoder angle.

    The ring baseline comes from the receiver separation, so ``ring`` only
    contributes its angle schedule.
    """
    ring = ring or RingConfig()
    skel = ring_points(RingConfig((cfg.baseline_lambda,), ring.gamma0, ring.step, ring.span,
                                  ring.dwell, ring.rotation_rate))
    values = np.empty(len(skel), dtype=complex)
    for i, (k, g) in enumerate(zip(skel.k, skel.gamma)):
        values[i] = correlate(*simulate_dwell(cfg, scatterers, float(g), int(k)))
    return skel.with_values(values)


def similarity(measured, reference) -> float:
    """Magnitude of the normalised complex inner product of two sample vectors."""
    a = np.asarray(measured, dtype=complex)
    b = np.asarray(reference, dtype=complex)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(abs(np.vdot(b, a)) / (na * nb))
