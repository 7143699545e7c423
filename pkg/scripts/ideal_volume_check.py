"""Compare quadrature volumes of random ideal tetrahedra with the angle formula.

    python scripts/ideal_volume_check.py --count 50 --tol 1e-7
"""

import argparse

import numpy as np

from hypvol import hypgeom


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tol", type=float, default=1e-6)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    errs = []
    for _ in range(args.count):
        S = hypgeom.random_ideal_simplex(rng)
        ref = hypgeom.ideal_tetra_volume(*hypgeom.ideal_tetra_angles(S))
        errs.append(abs(abs(hypgeom.signed_volume(S, args.tol)) - ref))
    errs = np.array(errs)
    print(f"{args.count} ideal tetrahedra at tol {args.tol:g}: "
          f"max error {errs.max():.2e}, median {np.median(errs):.2e}")


if __name__ == "__main__":
    main()
