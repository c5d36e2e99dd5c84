"""Mesh convergence study for the surface of revolution exporter.

Measures surface-area and enclosed-volume errors of revolve meshes of
the n=3 array against the closed forms over a resolution ladder and
prints the observed convergence orders (expected: 2).

Usage:
    python3 scripts/convergence_study.py --resolutions 32 64 128 256
"""

import argparse
import math

from archarray import make_archimedean, mesh_area, revolve_mesh


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--resolutions", type=int, nargs="+",
                    default=[32, 64, 128, 256])
    ap.add_argument("--r", type=float, default=1.0)
    args = ap.parse_args(argv)

    arr = make_archimedean(3, 2, args.r)
    area_exact = 4.0 * math.pi * args.r**2
    vol_exact = 4.0 * math.pi * args.r**3 / 3.0

    rows = []
    for res in args.resolutions:
        mesh = revolve_mesh(arr, res, res)
        rows.append((res,
                     abs(mesh_area(mesh) - area_exact) / area_exact,
                     abs(mesh.signed_volume() - vol_exact) / vol_exact))

    print(f"{'res':>5} {'area rel err':>14} {'order':>7} "
          f"{'volume rel err':>15} {'order':>7}")
    for i, (res, ea, ev) in enumerate(rows):
        oa = ov = ""
        if i > 0:
            ratio = math.log(rows[i][0] / rows[i - 1][0])
            oa = f"{math.log(rows[i - 1][1] / ea) / ratio:7.3f}"
            ov = f"{math.log(rows[i - 1][2] / ev) / ratio:7.3f}"
        print(f"{res:>5} {ea:>14.3e} {oa:>7} {ev:>15.3e} {ov:>7}")


if __name__ == "__main__":
    main()
