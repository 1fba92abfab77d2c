"""Strip, square and one-point/two-point counterexamples."""
import math

from metric_geodesy.gw import one_point_vs_two_point
from metric_geodesy.interpolation import geodesic_only_reach, lipschitz_reach, square_example, strip_counterexample
from metric_geodesy.proper import ProperFunction

from _common import parser, write_json


def main():
    ap = parser(__doc__)
    ap.add_argument("--res", type=float, default=0.05)
    args = ap.parse_args()

    strip = strip_counterexample(args.res)
    s, t, d, bound = strip.witness
    print(f"strip: d_H(slice {s}, slice {t}) = {d:.4f} > {bound} (sqrt(5)/2 = {math.sqrt(1.25):.4f})")

    sq = square_example(0.1)
    lip = lipschitz_reach(sq.X, sq.A, sq.B, sq.rho, K=8)
    geo = geodesic_only_reach(sq.X, sq.A, sq.B, sq.rho, K=8)
    in_lip, in_geo = sq.probe in lip.evaluation[4], sq.probe in geo.evaluation[4]
    print(f"square: (0, 2) in Lipschitz layer {in_lip}, in geodesic-only layer {in_geo}")

    bounded = []
    for tt in (0.5, 0.1, 0.01):
        w = one_point_vs_two_point(tt, ProperFunction.identity())
        bounded.append({"t": tt, "eta_lower": w.eta_lower, "delta": w.delta, "fails": w.fails})
        print(f"two-point t={tt}: eta >= {w.eta_lower:.4f}, delta = {w.delta:.4f}, bound fails {w.fails}")

    print(write_json(args.out, "counterexamples.json", {
        "strip": {"s": s, "t": t, "distance": d, "bound": bound, "violation": strip.violation},
        "square": {"in_lipschitz": in_lip, "in_geodesic_only": in_geo},
        "two_point": bounded,
    }))


if __name__ == "__main__":
    main()
