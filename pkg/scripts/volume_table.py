"""Total and enclosed volumes across the supported (n, k) grid.

For each pair the surface area from quadrature is compared against the
factorized closed form, and the enclosed volume against radial
quadrature; codimension n-1 rows also show the equizonal closed forms.

Usage:
    python3 scripts/volume_table.py --n-max 6 --r 1.0 --mc-samples 200000
"""

import argparse

import numpy as np

from archarray import (
    equizonal_enclosed_volume,
    equizonal_total_volume,
    make_archimedean,
)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=6)
    ap.add_argument("--r", type=float, default=1.0)
    ap.add_argument("--mc-samples", type=int, default=0,
                    help="optional Monte Carlo cross-check sample count")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    print(f"{'n':>3} {'k':>3} {'total area':>16} {'rel vs closed':>14} "
          f"{'enclosed':>16} {'mc z':>8}")
    for n in range(3, args.n_max + 1):
        for k in range(2, n):
            arr = make_archimedean(n, k, args.r)
            tv = arr.total_volume()
            rel = abs(tv.value - tv.closed_form) / tv.closed_form
            ev = arr.enclosed_volume(samples=args.mc_samples, seed=args.seed)
            z = ""
            if args.mc_samples:
                z = f"{abs(ev.mc_value - ev.value) / ev.mc_error:8.2f}"
            print(f"{n:>3} {k:>3} {tv.value:>16.10f} {rel:>14.2e} "
                  f"{ev.value:>16.10f} {z:>8}")
        if n >= 3:
            print(f"          equizonal closed forms (k = n-1): "
                  f"area {equizonal_total_volume(n, args.r):.10f}  "
                  f"enclosed {equizonal_enclosed_volume(n, args.r):.10f}")


if __name__ == "__main__":
    main()
