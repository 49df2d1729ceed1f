"""Scene <-> visibility transforms, ring gridding and point spread functions.

Sign convention: the forward transform uses ``exp(+j 2 pi (u l + v m))`` and
the inverse ``exp(-j 2 pi (u l + v m))``.  Both are evaluated with FFTs on
the grid pairing ``du = 1 / (cols * dl)`` so the pair is an exact discrete
inverse.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import NumericError, PreconditionError, SampleRangeError, ShapeError
from .scene import SceneIntensity

log = logging.getLogger(__name__)

IMAG_RESIDUAL_LIMIT = 1e-6


def frequency_axis(n: int, spatial_step: float) -> np.ndarray:
    """Spatial-frequency axis (rad^-1) paired with a spatial axis of ``n`` points."""
    return (np.arange(n) - n // 2) / (n * spatial_step)


def spatial_axis(n: int, frequency_step: float) -> np.ndarray:
    return (np.arange(n) - n // 2) / (n * frequency_step)


@dataclass(frozen=True)
class VisibilityGrid:
    values: np.ndarray  # complex, rows along v, columns along u
    u_axis: np.ndarray
    v_axis: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (len(self.v_axis), len(self.u_axis)):
            raise ShapeError(f"values shape {values.shape} does not match the u/v axes")
        object.__setattr__(self, "values", values)

    @property
    def du(self) -> float:
        return float(self.u_axis[1] - self.u_axis[0])

    @property
    def dv(self) -> float:
        return float(self.v_axis[1] - self.v_axis[0])

    @property
    def shape(self):
        return self.values.shape

    @classmethod
    def empty_like(cls, other: "VisibilityGrid") -> "VisibilityGrid":
        return cls(np.zeros_like(other.values), other.u_axis, other.v_axis)

    @classmethod
    def zeros(cls, rows: int, cols: int, du: float, dv: float | None = None) -> "VisibilityGrid":
        dv = du if dv is None else dv
        u_axis = (np.arange(cols) - cols // 2) * du
        v_axis = (np.arange(rows) - rows // 2) * dv
        return cls(np.zeros((rows, cols), dtype=complex), u_axis, v_axis)


@dataclass(frozen=True)
class SampledVisibility:
    grid: VisibilityGrid
    mask: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        if mask.shape != self.grid.shape:
            raise ShapeError("mask shape does not match the visibility grid")
        if not mask.any():
            raise PreconditionError("sampled visibility needs a non-empty mask")
        if np.any(self.grid.values[~mask] != 0):
            raise PreconditionError("values outside the mask must be exactly zero")
        object.__setattr__(self, "mask", mask)

    @classmethod
    def from_mask(cls, grid: VisibilityGrid, mask: np.ndarray) -> "SampledVisibility":
        """Keep ``grid`` values on ``mask`` and zero the rest."""
        mask = np.asarray(mask, dtype=bool)
        values = np.where(mask, grid.values, 0)
        return cls(VisibilityGrid(values, grid.u_axis, grid.v_axis), mask)

    @property
    def coverage(self) -> float:
        return float(self.mask.mean())


@dataclass(frozen=True)
class Reconstruction:
    """Real part of an inverse transform plus its discarded imaginary residual.

    ``imag_residual`` is ``max|Im| / max|Re|``.
    """

    values: np.ndarray
    l_axis: np.ndarray
    m_axis: np.ndarray
    imag_residual: float


def forward_visibility(scene: SceneIntensity) -> VisibilityGrid:
    values = scene.values
    if not np.all(np.isfinite(values)):
        raise NumericError("scene contains non-finite values")
    rows, cols = values.shape
    dl, dm = scene.dl, scene.dm
    spectrum = np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(values)))
    spectrum *= rows * cols * dl * dm
    return VisibilityGrid(spectrum, frequency_axis(cols, dl), frequency_axis(rows, dm))


def inverse_reconstruct(vs: SampledVisibility) -> Reconstruction:
    grid = vs.grid
    rows, cols = grid.shape
    image = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(grid.values)))
    image *= grid.du * grid.dv
    peak = float(np.max(np.abs(image.real)))
    residual = float(np.max(np.abs(image.imag)) / peak) if peak > 0 else 0.0
    if residual > IMAG_RESIDUAL_LIMIT:
        log.warning("reconstruction imaginary residual %.3g of peak (mask is not Hermitian)",
                    residual)
    return Reconstruction(image.real.copy(), spatial_axis(cols, grid.du),
                          spatial_axis(rows, grid.dv), residual)


def grid_ring_samples(samples, target: VisibilityGrid, hermitian: bool = False) -> SampledVisibility:
    """Accumulate ring samples into their nearest cells of ``target``.

    Samples landing in the same cell are averaged.  With ``hermitian=True``
    each sample also contributes its conjugate at ``(-u, -v)``, completing the
    half-plane ring that a real scene implies.
    """
    u = np.asarray(samples.u, dtype=float)
    v = np.asarray(samples.v, dtype=float)
    values = np.asarray(samples.value, dtype=complex)
    if not np.all(np.isfinite(values)):
        raise PreconditionError("ring samples carry unset (non-finite) values")
    rows, cols = target.shape
    ju = np.rint((u - target.u_axis[0]) / target.du).astype(int)
    iv = np.rint((v - target.v_axis[0]) / target.dv).astype(int)
    bad = np.flatnonzero((ju < 0) | (ju >= cols) | (iv < 0) | (iv >= rows))
    if bad.size:
        k = int(samples.k[bad[0]])
        raise SampleRangeError(
            f"sample k={k} at (u, v)=({u[bad[0]]:.6g}, {v[bad[0]]:.6g}) lies outside the grid", k=k)
    if hermitian:
        ju_c = np.rint((-u - target.u_axis[0]) / target.du).astype(int)
        iv_c = np.rint((-v - target.v_axis[0]) / target.dv).astype(int)
        keep = (ju_c >= 0) & (ju_c < cols) & (iv_c >= 0) & (iv_c < rows)
        if not keep.all():
            k = int(samples.k[np.flatnonzero(~keep)[0]])
            raise SampleRangeError(f"conjugate of sample k={k} lies outside the grid", k=k)
        ju = np.concatenate([ju, ju_c])
        iv = np.concatenate([iv, iv_c])
        values = np.concatenate([values, values.conj()])
    flat = iv * cols + ju
    total = np.bincount(flat, weights=values.real, minlength=rows * cols) \
        + 1j * np.bincount(flat, weights=values.imag, minlength=rows * cols)
    count = np.bincount(flat, minlength=rows * cols)
    mask = count > 0
    out = np.zeros(rows * cols, dtype=complex)
    out[mask] = total[mask] / count[mask]
    grid = VisibilityGrid(out.reshape(rows, cols), target.u_axis, target.v_axis)
    return SampledVisibility(grid, mask.reshape(rows, cols))


def psf(vs: SampledVisibility) -> Reconstruction:
    """Point spread function of the sampling pattern, normalised to peak 1."""
    indicator = VisibilityGrid(vs.mask.astype(complex), vs.grid.u_axis, vs.grid.v_axis)
    rec = inverse_reconstruct(SampledVisibility(indicator, vs.mask))
    peak = float(np.max(np.abs(rec.values)))
    return Reconstruction(rec.values / peak, rec.l_axis, rec.m_axis, rec.imag_residual)


def disk_mask(grid: VisibilityGrid, radius: float) -> np.ndarray:
    """Cells whose centre lies within ``radius`` of the origin."""
    uu, vv = np.meshgrid(grid.u_axis, grid.v_axis)
    return np.hypot(uu, vv) <= radius
