"""Per-stage timing of the detection pipeline.

Acquisition time is simulated (``K * dwell``); the other stages are measured
wall-clock on this machine and averaged over repetitions.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..dynarray import RingConfig, ring_points, rotation_schedule, sample_ring_from_visibility
from ..features import Normalizer, extract
from ..scene import SceneIntensity
from ..visibility import forward_visibility

STAGES = ("acquisition", "visibility", "features", "inference")


@dataclass(frozen=True)
class TimingReport:
    stages_ms: dict  # stage -> mean milliseconds
    repetitions: int

    @property
    def compute_ms(self) -> float:
        return sum(v for k, v in self.stages_ms.items() if k != "acquisition")

    @property
    def total_ms(self) -> float:
        return sum(self.stages_ms.values())

    def to_dict(self) -> dict:
        return {"stages_ms": dict(self.stages_ms), "compute_ms": self.compute_ms,
                "total_ms": self.total_ms, "repetitions": self.repetitions,
                "acquisition_simulated": True}


def _mean_ms(fn, reps):
    fn()  # warm caches and any JIT
    t = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        t.append(time.perf_counter() - t0)
    return 1e3 * float(np.mean(t))


def timing_report(scene: SceneIntensity, ring: RingConfig, norm: Normalizer, classify,
                  repetitions: int = 20) -> TimingReport:
    """Time one ring through visibility sampling, feature extraction and ``classify``.

    ``classify`` maps a (1, 11) array of normalised features to a label.
    """
    skel = ring_points(ring)
    samples = sample_ring_from_visibility(skel, forward_visibility(scene))
    fv = extract(samples)
    stages = {
        "acquisition": 1e3 * rotation_schedule(ring).t_ring,
        "visibility": _mean_ms(lambda: sample_ring_from_visibility(skel, forward_visibility(scene)),
                               repetitions),
        "features": _mean_ms(lambda: extract(samples), repetitions),
        "inference": _mean_ms(lambda: classify(norm.transform(fv.as_array())[None, :]), repetitions),
    }
    return TimingReport(stages, int(repetitions))
