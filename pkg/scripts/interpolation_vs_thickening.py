"""Compare Lipschitz-reach layers with thickening slices on segment, cycle and grid carriers."""
import numpy as np

from metric_geodesy.interpolation import interpolation_equals_thickening
from metric_geodesy.spaces import cycle, grid, segment

from _common import parser, write_rows


def carriers():
    yield "segment", segment(81), list(range(9)), list(range(72, 81))
    yield "cycle64", cycle(64), list(range(9)) + list(range(56, 64)), list(range(24, 41))
    G = grid(41, 21)
    P = np.asarray(G.labels)
    yield "grid41x21", G, np.flatnonzero(P[:, 0] <= 8).tolist(), np.flatnonzero(P[:, 0] >= 32).tolist()


def main():
    ap = parser(__doc__)
    ap.add_argument("-K", type=int, default=8)
    args = ap.parse_args()
    rows = []
    for name, X, A, B in carriers():
        rep = interpolation_equals_thickening(X, A, B, K=args.K, slack=0)
        for layer in rep.layers:
            rows.append((name, layer.t, layer.evaluation_size, layer.thickening_size, layer.hausdorff))
        print(f"{name}: ok={rep.ok} max gap={max(l.hausdorff for l in rep.layers):g}")
    print(write_rows(args.out, "interpolation_vs_thickening.csv",
                     ("carrier", "t", "layer_size", "thickening_size", "hausdorff_gap"), rows))


if __name__ == "__main__":
    main()
