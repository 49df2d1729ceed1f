"""Structural similarity with uniform 8x8 windows."""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import PreconditionError

WINDOW = 8
K1, K2 = 0.01, 0.03


def unit_intensity(img) -> np.ndarray:
    """Clip negative lobes (not a physical intensity) and scale the peak to 1."""
    x = np.clip(np.asarray(img, dtype=float), 0.0, None)
    peak = x.max()
    return x / peak if peak > 0 else x


def ssim_map(reference, test, window: int = WINDOW, data_range: float = 1.0) -> np.ndarray:
    x = np.asarray(reference, dtype=float)
    y = np.asarray(test, dtype=float)
    if x.shape != y.shape or x.ndim != 2:
        raise PreconditionError(f"image shapes differ: {x.shape} vs {y.shape}")
    if min(x.shape) < window:
        raise PreconditionError(f"images smaller than the {window}x{window} window")
    c1 = (K1 * data_range) ** 2
    c2 = (K2 * data_range) ** 2
    wx = sliding_window_view(x, (window, window))
    wy = sliding_window_view(y, (window, window))
    mx = wx.mean(axis=(-2, -1))
    my = wy.mean(axis=(-2, -1))
    # population moments inside each window
    vx = (wx**2).mean(axis=(-2, -1)) - mx**2
    vy = (wy**2).mean(axis=(-2, -1)) - my**2
    cxy = (wx * wy).mean(axis=(-2, -1)) - mx * my
    return ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx**2 + my**2 + c1) * (vx + vy + c2))


def ssim(reference, test, window: int = WINDOW) -> float:
    """Mean SSIM over all fully contained windows; inputs should already lie in [0, 1]."""
    return float(ssim_map(reference, test, window).mean())


def ring_privacy_ssim(scene, ring=None, hermitian: bool = False, mask=None) -> tuple:
    """SSIM between a scene and its reconstruction from sparse visibility samples.

    By default the scene is sampled on the ring; ``mask`` substitutes any
    boolean uv mask (for dense-sampling comparisons).  Returns ``(ssim,
    reconstruction)``.
    """
    from ..dynarray import RingConfig, ring_points, sample_ring_from_visibility
    from ..visibility import SampledVisibility, forward_visibility, grid_ring_samples, inverse_reconstruct

    vis = forward_visibility(scene)
    if mask is None:
        samples = sample_ring_from_visibility(ring_points(ring or RingConfig()), vis)
        sampled = grid_ring_samples(samples, vis, hermitian=hermitian)
    else:
        sampled = SampledVisibility.from_mask(vis, mask)
    rec = inverse_reconstruct(sampled)
    return ssim(unit_intensity(scene.values), unit_intensity(rec.values)), rec
