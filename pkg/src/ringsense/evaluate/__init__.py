"""Metrics, Monte-Carlo evaluation, ROC statistics, SSIM and timing."""

from .metrics import ConfusionCounts, MetricSet, confusion, metrics
from .montecarlo import ClassifierSpec, McReport, monte_carlo
from .roc import RocCurve, SigmaContours, roc_sweep, sigma_contours
from .ssim import ring_privacy_ssim, ssim, unit_intensity
from .timing import TimingReport, timing_report

__all__ = [
    "ConfusionCounts", "MetricSet", "metrics", "confusion",
    "ClassifierSpec", "McReport", "monte_carlo",
    "RocCurve", "SigmaContours", "roc_sweep", "sigma_contours",
    "ssim", "unit_intensity", "ring_privacy_ssim", "TimingReport", "timing_report",
]
