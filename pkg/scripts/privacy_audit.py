"""SSIM between a scene and its reconstruction from ring or dense spectra.

    python3 scripts/privacy_audit.py [--fractions 0.1 0.3 0.5] [--hermitian]

A ring of samples should reconstruct nothing recognisable (low SSIM) while
a filled disk covering a good part of the spectrum should.
"""

import argparse
import math

from ringsense.config import SceneConfig
from ringsense.dynarray import RingConfig
from ringsense.evaluate import ring_privacy_ssim
from ringsense.scene import GeometryContext
from ringsense.visibility import disk_mask, forward_visibility

p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
p.add_argument("--fractions", type=float, nargs="+", default=[0.1, 0.3, 0.5])
p.add_argument("--orientations", type=float, nargs="+", default=[0.0, 45.0, 90.0],
               help="gun rotations in degrees")
p.add_argument("--hermitian", action="store_true", help="also use the mirrored ring samples")
args = p.parse_args()

ctx = GeometryContext()
for deg in args.orientations:
    scene = SceneConfig(orientation=math.radians(deg)).build(ctx)
    score, _ = ring_privacy_ssim(scene, RingConfig(), hermitian=args.hermitian)
    print(f"gun at {deg:5.1f} deg: ring SSIM {score:.3f}")
    vis = forward_visibility(scene)
    span = vis.u_axis[-1] - vis.u_axis[0]
    for frac in args.fractions:
        mask = disk_mask(vis, math.sqrt(frac * span * span / math.pi) * 1.01)
        dense, _ = ring_privacy_ssim(scene, mask=mask)
        print(f"    disk covering {mask.mean():5.1%}: SSIM {dense:.3f}")
