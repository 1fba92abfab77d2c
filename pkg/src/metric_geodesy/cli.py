"""metric-geodesy command line.

Exit status: 0 on success or certified, 1 on certification failure, 2 on input error.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from . import io as mio
from .gh import (
    DynamicCorrespondence,
    GeodesicSampling,
    certify_gh_geodesic,
    dyadic_times,
    gh_exact,
    glue_via_correspondence,
    straight_line_gh_geodesic,
)
from .gw import (
    GWPairCertificate,
    certify_gw_geodesic,
    family_certificates,
    family_curve,
    gw_alternating_min,
    straight_line_gw_coupling,
    straight_line_gw_geodesic,
    branching_family,
    deviant_family,
)
from .interpolation import extract_curve, interpolation_equals_thickening, lipschitz_reach
from .spaces import MetricMeasureSpace, hausdorff_distance, to_fraction
from .transport import hyperspace_hausdorff_check, wasserstein_inf, wasserstein_p

TOOL = "metric-geodesy"


class CertificationFailed(Exception):
    pass


# ------------------------------------------------------------------ helpers

def _space(path):
    return mio.load_space(path)


def _mm(path):
    S = mio.load_space(path)
    if not isinstance(S, MetricMeasureSpace):
        raise mio.InputError("SCHEMA", "a metric measure space needs a 'mass' vector", str(path))
    return S


def _metric(S):
    return S.space if isinstance(S, MetricMeasureSpace) else S


def _param(args, value):
    if value is None:
        return None
    return to_fraction(value) if args.exact else float(value)


def _scenario(path):
    data = mio.read_json(path)
    for key in ("space", "A", "B"):
        if key not in data:
            raise mio.InputError("SCHEMA", f"scenario needs '{key}'", str(path))
    space_path = Path(path).parent / data["space"] if isinstance(data["space"], str) else None
    X = _metric(mio.load_space(space_path) if space_path else mio.space_from_dict(data["space"], str(path)))
    subsets = []
    for key in ("A", "B"):
        S = data[key]
        if not isinstance(S, list) or not S or not all(isinstance(i, int) and 0 <= i < len(X) for i in S):
            raise mio.InputError("SUBSET", f"{key} must be a nonempty list of point indices", str(path))
        subsets.append(sorted(set(S)))
    return X, subsets[0], subsets[1], data


def _geodesic_bundle(kind, g: GeodesicSampling, extra) -> dict:
    out = {
        "kind": kind,
        "times": [mio.encode_number(t) for t in g.times],
        "rho": mio.encode_number(g.endpoint_value),
        "certified": g.certified,
        "slices": [mio.space_to_dict(S) for S in g.spaces],
    }
    out.update(extra)
    return out


def _bundle_slices(data, source):
    try:
        times = [mio.decode_time(t, source) for t in data["times"]]
        slices = [mio.space_from_dict(S, source) for S in data["slices"]]
        rho = mio.decode_time(data["rho"], source)
    except (KeyError, TypeError) as exc:
        raise mio.InputError("SCHEMA", "bundle needs times, slices and rho", source) from exc
    return times, slices, rho


def _grid(args, fallback: int = 8) -> int:
    K = fallback if args.grid is None else args.grid
    if K < 1:
        raise mio.InputError("USAGE", "--grid must be at least 1")
    return K


def _as_time(t):
    return t if isinstance(t, Fraction) else float(t)


# ----------------------------------------------------------------- commands

def cmd_validate(args):
    rows = []
    for path in args.files:
        S = mio.load_space(path)
        rows.append({"file": path, "points": len(S), "measure": isinstance(S, MetricMeasureSpace),
                     "exact": S.exact, "diameter": _metric(S).diameter(), "status": "valid"})
    return {"files": rows}, (["file", "points", "status"], [(r["file"], r["points"], r["status"]) for r in rows])


def cmd_dist(args):
    if args.gh:
        X, Y = _metric(_space(args.files[0])), _metric(_space(args.files[1]))
        value, R = gh_exact(X, Y, args.guard)
        res = {"quantity": "gh", "value": value, "kind": "exact", "correspondence": mio.correspondence_to_dict(R)}
    elif args.gw:
        Xm, Ym = _mm(args.files[0]), _mm(args.files[1])
        r = gw_alternating_min(Xm, Ym, int(args.p), seed=args.seed)
        res = {"quantity": f"gw{int(args.p)}", "value": r.value, "kind": "upper_bound",
               "coupling": mio.coupling_to_dict(r.cross, r.plan)}
    elif args.hausdorff:
        X, A, B, _ = _scenario(args.files[0])
        res = {"quantity": "hausdorff", "value": hausdorff_distance(X, A, B), "kind": "exact"}
    else:
        if len(args.files) != 3:
            raise mio.InputError("USAGE", "transport distances need SPACE ALPHA BETA")
        Z = _metric(_space(args.files[0]))
        a = mio.load_measure(args.files[1], len(Z))
        b = mio.load_measure(args.files[2], len(Z))
        if math.isinf(args.p):
            res = {"quantity": "w_inf", "value": wasserstein_inf(Z, a, b), "kind": "exact"}
        else:
            value, plan = wasserstein_p(Z, a, b, args.p)
            res = {"quantity": f"w{args.p:g}", "value": value, "kind": "exact", "plan": mio.encode_matrix(plan)}
    return res, (["quantity", "value", "kind"], [(res["quantity"], res["value"], res["kind"])])


def cmd_geodesic(args):
    times = dyadic_times(_grid(args), exact=args.exact)
    if args.gw:
        Xm, Ym = _mm(args.files[0]), _mm(args.files[1])
        p = int(args.p)
        r = gw_alternating_min(Xm, Ym, p, seed=args.seed)
        times = dyadic_times(_grid(args))
        g = straight_line_gw_geodesic(Xm, Ym, r.cross, r.plan, times, p=p, rho=r.value)
        certs = []
        for i, s in enumerate(times):
            for t in times[i + 1:]:
                cross, plan = straight_line_gw_coupling(Xm, Ym, r.cross, r.plan, s, t)
                certs.append({"pair": [s, t], **mio.coupling_to_dict(cross, plan)})
        bundle = _geodesic_bundle("gw-geodesic", g, {"p": p, "certificates": certs,
                                                     "note": "conditional on optimality of the coupling"})
    else:
        X, Y = _metric(_space(args.files[0])), _metric(_space(args.files[1]))
        _, R = gh_exact(X, Y, args.guard)
        g = straight_line_gh_geodesic(X, Y, R, times, guard=args.guard)
        bundle = _geodesic_bundle("gh-geodesic", g, {
            "correspondence": mio.correspondence_to_dict(R),
            "dynamic": [list(tup) for tup in g.dynamic.tuples],
        })
    rows = [(t, len(S)) for t, S in zip(g.times, g.spaces)]
    return bundle, (["t", "points"], rows)


def _certify_gw(data, args, source):
    times, slices, rho = _bundle_slices(data, source)
    p = data.get("p", args.p)
    g = GeodesicSampling(tuple(times), tuple(slices), rho, data.get("certified"))
    certs = []
    for c in data.get("certificates", []):
        s, t = (mio.decode_time(v, source) for v in c["pair"])
        cross, plan = mio.coupling_from_dict(c, source)
        certs.append(GWPairCertificate(_as_time(s), _as_time(t), cross, plan))
    rep = certify_gw_geodesic(g, certs, p, args.tol)
    rows = [(s, t, cost, target, status) for s, t, _, _, cost, target, status in rep.entries]
    result = {"ok": rep.ok, "rho": rho, "p": p,
              "pairs": [{"pair": [s, t], "bound": b, "target": tg, "coupling_valid": v, "marginals_ok": mk,
                         "status": st} for s, t, v, mk, b, tg, st in rep.entries]}
    return rep.ok, result, rows


def _certify_gh(data, args, source):
    times, slices, rho = _bundle_slices(data, source)
    dyn = DynamicCorrespondence(tuple(tuple(t) for t in data["dynamic"])) if data.get("dynamic") else None
    g = GeodesicSampling(tuple(times), tuple(_metric(S) for S in slices), rho, data.get("certified"), dyn)
    rep = certify_gh_geodesic(g, args.tol, args.guard)
    rows = [(c.s, c.t, c.bound, c.target, c.status) for c in rep.pairs]
    result = {"ok": rep.ok, "rho": rho,
              "pairs": [{"pair": [c.s, c.t], "bound": c.bound, "target": c.target, "source": c.source,
                         "witness": [list(w) for w in c.witness], "status": c.status} for c in rep.pairs]}
    return rep.ok, result, rows


def cmd_certify(args):
    source = args.files[0]
    data = mio.read_json(source)
    kind = data.get("kind") if isinstance(data, dict) else None
    if args.gw_geodesic or (not args.gh_geodesic and kind == "gw-geodesic"):
        ok, result, rows = _certify_gw(data, args, source)
    elif args.gh_geodesic or kind == "gh-geodesic":
        ok, result, rows = _certify_gh(data, args, source)
    else:
        raise mio.InputError("SCHEMA", "unknown bundle kind", source)
    if not ok:
        raise CertificationFailed((result, (["t_s", "t_t", "bound", "target", "status"], rows)))
    return result, (["t_s", "t_t", "bound", "target", "status"], rows)


def cmd_interpolate(args):
    X, A, B, data = _scenario(args.files[0])
    K = _grid(args, int(data.get("K", 8)))
    slack = data.get("slack")
    rep = interpolation_equals_thickening(X, A, B, K, slack)
    reach = lipschitz_reach(X, A, B, None, K, slack)
    mid = K // 2
    curve = extract_curve(X, reach, mid, min(reach.evaluation[mid])) if reach.evaluation[mid] else None
    layers = []
    for lay, ev in zip(rep.layers, reach.evaluation):
        layers.append({"t": lay.t, "size": len(ev), "points": sorted(ev), "hausdorff_to_thickening": lay.hausdorff,
                       "equals_thickening": not lay.unexplained and bool(ev), "witnesses": list(lay.unexplained)})
    result = {"ok": rep.ok, "rho": reach.rho, "K": K, "slack": reach.slack, "layers": layers,
              "curve": list(curve.points) if curve else None}
    rows = [(l["t"], l["size"], str(l["equals_thickening"]).lower()) for l in layers]
    table = (["t", "layer_size", "equals_thickening"], rows)
    if not rep.ok:
        raise CertificationFailed((result, table))
    return result, table


def cmd_glue(args):
    X, Y = _metric(_space(args.files[0])), _metric(_space(args.files[1]))
    value, R = gh_exact(X, Y, args.guard)
    G = glue_via_correspondence(X, Y, R)
    eX, eY = (np.asarray(e) for e in G.embeddings)
    d_h = hausdorff_distance(G.space, eX, eY)
    result = {"gh": value, "hausdorff_in_gluing": d_h, "space": mio.space_to_dict(G.space),
              "embeddings": [eX.tolist(), eY.tolist()], "correspondence": mio.correspondence_to_dict(R)}
    return result, (["quantity", "value"], [("gh", value), ("hausdorff_in_gluing", d_h)])


def cmd_family(args):
    kind = "deviant" if args.deviant else "branching"
    n, m = args.n, args.m
    sigma, a = _param(args, args.sigma), _param(args, args.a)
    if kind == "deviant" and sigma is None:
        raise mio.InputError("USAGE", "--sigma is required for the deviant family")
    if kind == "branching" and a is None:
        raise mio.InputError("USAGE", "--a is required for the branching family")
    try:
        if args.t is not None:
            t = _param(args, args.t)
            S = deviant_family(n, m, sigma, t) if kind == "deviant" else branching_family(n, a, t)
            out = mio.space_to_dict(S)
            return out, (["label", "mass"], list(zip(map(str, S.space.labels), S.mass.tolist())))
        times = dyadic_times(_grid(args), exact=args.exact)
        g = family_curve(kind, times, n, m, sigma, a)
        certs = family_certificates(kind, times, n, m, sigma, a)
    except ValueError as exc:
        raise mio.InputError("PARAMETER", str(exc)) from exc
    bundle = _geodesic_bundle("gw-geodesic", g, {
        "p": args.p,
        "family": {"kind": kind, "n": n, "m": m, "sigma": None if sigma is None else mio.encode_number(sigma),
                   "a": None if a is None else mio.encode_number(a)},
        "certificates": [{"pair": [mio.encode_number(c.s), mio.encode_number(c.t)], **mio.coupling_to_dict(c.cross, c.plan)}
                         for c in certs],
    })
    return bundle, (["t", "points"], [(t, len(S)) for t, S in zip(g.times, g.spaces)])


def cmd_report(args):
    Z, X, Y, data = _scenario(args.files[0])
    eps = float(data.get("eps", 0.05 * float(Z.diameter())))
    rep = hyperspace_hausdorff_check(Z, X, Y, args.p, eps, int(data.get("samples", 50)), args.seed)
    result = {"ok": rep.ok, "eta": rep.eta, "eps": rep.eps, "estimate": rep.estimate, "lower": rep.lower,
              "samples": [{"sample_id": k, "side": side, "distance": d, "pushforward_cost": c, "within_sandwich": w}
                          for k, side, d, c, w in rep.samples]}
    table = (["sample_id", "distance", "within_sandwich"],
             [(k, d, str(w).lower()) for k, _, d, _, w in rep.samples])
    if not rep.ok:
        raise CertificationFailed((result, table))
    return result, table


COMMANDS = {
    "validate": cmd_validate, "dist": cmd_dist, "geodesic": cmd_geodesic, "certify": cmd_certify,
    "interpolate": cmd_interpolate, "glue": cmd_glue, "family": cmd_family, "report": cmd_report,
}


# ------------------------------------------------------------------ parsing

def _positive(value):
    v = float(value)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=float, default=1.0, help="transport exponent (inf allowed for dist)")
    common.add_argument("--grid", type=int, metavar="K", help="time grid k/K (default 8)")
    common.add_argument("--sigma", help="deviant family parameter")
    common.add_argument("--a", help="branching time")
    common.add_argument("-n", type=int, default=3)
    common.add_argument("-m", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=_positive, default=1e-9)
    common.add_argument("--guard", type=int, default=7, help="largest space for exact correspondence search")
    common.add_argument("--exact", action="store_true", help="rational arithmetic")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", metavar="PATH")

    parser = argparse.ArgumentParser(prog=TOOL, description="Geodesics in Gromov-Hausdorff and Gromov-Wasserstein space.")
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common], help="check space files").add_argument("files", nargs="+")

    p = sub.add_parser("dist", parents=[common], help="distances")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--gh", action="store_true", help="exact Gromov-Hausdorff distance of two spaces")
    g.add_argument("--gw", action="store_true", help="Gromov-Wasserstein upper bound of two mm-spaces")
    g.add_argument("--hausdorff", action="store_true", help="Hausdorff distance of scenario subsets")
    g.add_argument("--wp", action="store_true", help="Wasserstein distance: SPACE ALPHA BETA (default)")
    p.add_argument("files", nargs="+")

    p = sub.add_parser("geodesic", parents=[common], help="straight-line geodesic bundle")
    p.add_argument("--gw", action="store_true")
    p.add_argument("files", nargs=2)

    p = sub.add_parser("certify", parents=[common], help="replay a geodesic bundle")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--gh-geodesic", action="store_true")
    g.add_argument("--gw-geodesic", action="store_true")
    p.add_argument("files", nargs=1)

    p = sub.add_parser("interpolate", parents=[common], help="Hausdorff displacement interpolation")
    p.add_argument("files", nargs=1)

    sub.add_parser("glue", parents=[common], help="glue two spaces along an optimal correspondence").add_argument("files", nargs=2)

    p = sub.add_parser("family", parents=[common], help="deviant or branching Gromov-Wasserstein geodesics")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--deviant", action="store_true")
    g.add_argument("--branching", action="store_true")
    p.add_argument("-t", help="emit the single slice at time t")

    sub.add_parser("report", parents=[common], help="hyperspace Hausdorff sandwich report").add_argument("files", nargs=1)
    return parser


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "format")}


def _render(args, result, table) -> str:
    if args.format == "csv":
        return mio.csv_text(*table)
    doc = {"tool": {"name": TOOL, "version": __version__}, "command": args.command,
           "config": mio.report_value(_config(args)), "result": mio.report_value(result)}
    if args.command == "family" and args.t is not None:
        doc = result  # a bare mm-space file, loadable by the other commands
    elif args.command in ("family", "geodesic"):
        doc = {**result, "tool": doc["tool"], "config": doc["config"]}
    return mio.dumps(doc)


def _emit(args, text):
    if args.out:
        mio.write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result, table = COMMANDS[args.command](args)
    except mio.InputError as exc:
        sys.stderr.write(mio.dumps({"error": exc.as_dict()}))
        return 2
    except CertificationFailed as exc:
        result, table = exc.args[0]
        _emit(args, _render(args, result, table))
        return 1
    _emit(args, _render(args, result, table))
    return 0


if __name__ == "__main__":
    sys.exit(main())
