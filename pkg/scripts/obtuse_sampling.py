"""Sample compact tetrahedra and report volume maxima per obtuseness class.

    python scripts/obtuse_sampling.py --count 2000 --seed 1
"""

import argparse
from collections import defaultdict

import numpy as np

from hypvol import hypgeom, specfun


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--radius", type=float, default=3.0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    vols = defaultdict(list)
    for _ in range(args.count):
        S = hypgeom.random_compact_simplex(rng, radius=args.radius)
        cls = hypgeom.classify_obtuseness(S, atol=1e-9)
        vols[cls].append(abs(hypgeom.signed_volume(S, 1e-6)))

    ceilings = {hypgeom.ObtusenessClass.ONE_OBTUSE: specfun.catalan(),
                hypgeom.ObtusenessClass.TWO_OBTUSE: specfun.v_n(3) / 2}
    for cls in hypgeom.ObtusenessClass:
        v = vols.get(cls, [])
        top = f"{max(v):.5f}" if v else "-"
        cap = f"{ceilings[cls]:.5f}" if cls in ceilings else "-"
        print(f"{cls.value:>14}: {len(v):>6} samples, max volume {top:>8}, ceiling {cap}")


if __name__ == "__main__":
    main()
