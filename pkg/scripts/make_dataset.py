"""Regenerate the bundled phantom feature sets.

    python3 scripts/make_dataset.py [--seed 0] [--n 80] [--out src/ringsense/data]
"""

import argparse
import time
from pathlib import Path

from ringsense import formats
from ringsense.synthetic import VARIANTS, make_dataset

p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
p.add_argument("--seed", type=int, default=0)
p.add_argument("--n", type=int, default=80, help="measurements per class")
p.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "src/ringsense/data"))
p.add_argument("--variants", nargs="+", default=sorted(VARIANTS))
args = p.parse_args()

out = Path(args.out)
out.mkdir(parents=True, exist_ok=True)
for name in args.variants:
    t0 = time.perf_counter()
    data = make_dataset(VARIANTS[name], args.n, args.seed, name)
    path = out / f"{name}.featcsv"
    formats.write_features(path, data.features, data.labels, data.source_id)
    print(f"{path}: {len(data)} rows in {time.perf_counter() - t0:.1f} s")
