"""Upper and lower bounds for the Gromov-Wasserstein distance between a point and a uniform simplex."""
import time

from metric_geodesy.gw import gw_alternating_min, gw_delta_lower_bound
from metric_geodesy.spaces import simplex

from _common import parser, write_rows


def main():
    ap = parser(__doc__)
    ap.add_argument("--max-n", type=int, default=8)
    args = ap.parse_args()
    rows = []
    for p in (1, 2):
        for n in range(2, args.max_n + 1):
            start = time.perf_counter()
            r = gw_alternating_min(simplex(1, measure=True), simplex(n, measure=True), p)
            rows.append((n, p, r.value, gw_delta_lower_bound(n, p), time.perf_counter() - start))
            print(f"n={n} p={p} upper={r.value:.12f} lower={rows[-1][3]}")
    print(write_rows(args.out, "simplex_gw.csv", ("n", "p", "upper", "lower", "seconds"), rows))


if __name__ == "__main__":
    main()
