"""Print the truncated-tetrahedron census with every applicable bound.

    python scripts/census_table.py --g-max 12
"""

import argparse

from hypvol import bounds


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--g-min", type=int, default=2)
    ap.add_argument("--g-max", type=int, default=12)
    ap.add_argument("--tol", type=float, default=1e-9)
    args = ap.parse_args()

    rows = bounds.census_table(args.g_min, args.g_max, args.tol)
    print(f"{'g':>4} {'vol(D_g)':>10} {'vol':>10} {'||dM||':>7} "
          f"{'vol/v3':>10} {'boundary':>10} {'5/4||dM||':>10}  best")
    for r in rows:
        rep = r.report
        print(f"{r.g:>4} {r.vol_delta_g:>10.6f} {r.data.vol:>10.5f} {r.data.sv_boundary:>7.0f} "
              f"{rep.jungreis:>10.5f} {rep.thmB:>10.5f} {rep.bfp:>10.5f}  {r.best}")
    print(f"best bound is 5/4 ||dM|| from g = {bounds.switchover_genus(rows)} on")


if __name__ == "__main__":
    main()
