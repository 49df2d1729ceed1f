"""Per-stage latency of one ring through visibility, features and inference.

    python3 scripts/timing_benchmark.py [--classifier svm] [--repetitions 50]

The acquisition stage is the simulated mechanical rotation time, not a
measured one.
"""

import argparse

from ringsense.cli import bundled_dataset, predictor, train
from ringsense.config import SceneConfig
from ringsense.dynarray import RingConfig
from ringsense.evaluate import ClassifierSpec, timing_report
from ringsense.scene import GeometryContext

p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
p.add_argument("--classifier", choices=("thr", "knn", "svm"), default="svm")
p.add_argument("--k", type=int, default=11)
p.add_argument("--repetitions", type=int, default=50)
p.add_argument("--grids", type=int, nargs="+", default=[128, 256, 512])
args = p.parse_args()

model, norm = train(ClassifierSpec(args.classifier, k=args.k), bundled_dataset("jittered"))
classify = predictor(model)
for n in args.grids:
    scene = SceneConfig(rows=n, cols=n).build(GeometryContext())
    rep = timing_report(scene, RingConfig(), norm, classify, args.repetitions)
    stages = ", ".join(f"{k} {v:.3f} ms" for k, v in rep.stages_ms.items())
    print(f"grid {n}: {stages}; compute {rep.compute_ms:.3f} ms")
