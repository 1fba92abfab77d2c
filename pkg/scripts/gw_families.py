"""Exact certification of the deviant and branching Gromov-Wasserstein geodesic families."""
from fractions import Fraction

from metric_geodesy.gh import dyadic_times
from metric_geodesy.gw import certify_gw_geodesic, family_certificates, family_curve

from _common import parser, write_rows


def main():
    ap = parser(__doc__)
    ap.add_argument("-n", type=int, default=3)
    ap.add_argument("-m", type=int, default=2)
    ap.add_argument("-K", type=int, default=8)
    args = ap.parse_args()
    times = dyadic_times(args.K, exact=True)
    rows = []
    for kind, key in (("deviant", "sigma"), ("branching", "a")):
        for v in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
            kw = {key: v}
            curve = family_curve(kind, times, args.n, args.m, **kw)
            certs = family_certificates(kind, times, args.n, args.m, **kw)
            for p in (1, 2):
                rep = certify_gw_geodesic(curve, certs, p)
                certified = sum(e[-1] == "certified" for e in rep.entries)
                rows.append((kind, str(v), p, rep.ok, certified, len(rep.entries)))
                print(f"{kind} {key}={v} p={p}: {certified}/{len(rep.entries)} pairs certified")
    print(write_rows(args.out, "gw_families.csv", ("family", "parameter", "p", "ok", "certified", "pairs"), rows))


if __name__ == "__main__":
    main()
