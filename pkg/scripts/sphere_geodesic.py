"""Thickening geodesic between an antipodal pair and the whole sampled circle."""
import math
import time

from metric_geodesy.gh import certify_gh_geodesic
from metric_geodesy.interpolation import certify_hausdorff_geodesic, sampled_geodesic, sphere_example, thickening_geodesic

from _common import parser, write_rows


def main():
    ap = parser(__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[36, 72, 180, 360])
    ap.add_argument("-K", type=int, default=10)
    args = ap.parse_args()
    rows = []
    for N in args.sizes:
        start = time.perf_counter()
        S = sphere_example(N)
        times = tuple(k / args.K for k in range(args.K + 1))
        slices = [thickening_geodesic(S.X, S.A, S.B, t) for t in times]
        tol = 4 * math.pi / N
        h = certify_hausdorff_geodesic(S.X, slices, times, tol=tol).ok
        g = certify_gh_geodesic(sampled_geodesic(S.X, slices, times, S.d_gh), tol=tol).ok
        rows.append((N, S.d_h, S.d_gh, math.pi / 2, h, g, time.perf_counter() - start))
        print(f"N={N} d_H={S.d_h:.6f} d_GH={S.d_gh:.6f} hausdorff={h} gh={g}")
    header = ("N", "d_hausdorff", "d_gh", "continuum", "hausdorff_certified", "gh_certified", "seconds")
    print(write_rows(args.out, "sphere_geodesic.csv", header, rows))


if __name__ == "__main__":
    main()
