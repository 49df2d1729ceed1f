"""Monte Carlo comparison of the threshold, KNN and SVM classifiers.

    python3 scripts/run_montecarlo.py [--dataset jittered] [--iters 500] [--seed 0]

Prints mean and standard deviation of TPR, FPR, accuracy and F1 over
seeded 70/30 stratified splits of a bundled feature set (or a FEATCSV file).
"""

import argparse
import time
from pathlib import Path

from ringsense import formats
from ringsense.cli import bundled_dataset
from ringsense.evaluate import monte_carlo
from ringsense.evaluate.metrics import METRIC_NAMES
from ringsense.evaluate.montecarlo import DEFAULT_SPECS

p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
p.add_argument("--dataset", default="jittered", help="bundled name or path to a .featcsv file")
p.add_argument("--iters", type=int, default=500)
p.add_argument("--train-frac", type=float, default=0.7)
p.add_argument("--seed", type=int, default=0)
p.add_argument("--out", help="optional MCREPORT1 output path")
args = p.parse_args()

path = Path(args.dataset)
data = formats.read_features(path) if path.suffix == ".featcsv" else bundled_dataset(args.dataset)
t0 = time.perf_counter()
rep = monte_carlo(data, DEFAULT_SPECS, args.iters, args.train_frac, args.seed)
print(f"{len(data)} rows, {args.iters} iterations in {time.perf_counter() - t0:.1f} s")
print(f"{'classifier':<10}" + "".join(f"{m:>18}" for m in METRIC_NAMES))
for name in rep.names:
    mean, std = rep.mean(name), rep.std(name)
    print(f"{name:<10}" + "".join(f"{mean[m]:>10.4f} +-{std[m]:.3f}" for m in METRIC_NAMES))
if args.out:
    formats.write_mc_report(args.out, rep)
    print(f"wrote {args.out}")
