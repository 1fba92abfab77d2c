"""JSON and CSV formats for spaces, measures, correspondences, couplings and reports.

Numbers are decimal floats or rational strings such as "1/6". A matrix with
at least one rational string loads in exact mode (every entry a Fraction).
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np

from .gh import Correspondence
from .spaces import FiniteMetricSpace, MetricMeasureSpace, exact_array

SIG_DIGITS = 12


class InputError(ValueError):
    """Input problem with a machine-readable code and a position (file, index)."""

    def __init__(self, code: str, message: str, source=None, index=None):
        super().__init__(f"{code}: {message}" + (f" [{source}]" if source else "") + (f" at {index}" if index is not None else ""))
        self.code = code
        self.source = source
        self.index = index

    def as_dict(self) -> dict:
        return {"code": self.code, "message": str(self), "file": self.source,
                "index": list(self.index) if isinstance(self.index, tuple) else self.index}


# ------------------------------------------------------------------ numbers

def encode_number(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else str(v.numerator)
    if isinstance(v, (np.integer, int)) and not isinstance(v, bool):
        return int(v)
    return float(v)


def encode_matrix(M):
    M = np.asarray(M)
    if M.ndim == 1:
        return [encode_number(v) for v in M.tolist()]
    return [encode_matrix(row) for row in M]


def decode_matrix(data, source=None, what="matrix"):
    try:
        arr = np.asarray(data, dtype=object)
    except ValueError as exc:
        raise InputError("SCHEMA", f"{what} is ragged", source) from exc
    flat = arr.ravel().tolist()
    for k, v in enumerate(flat):
        if isinstance(v, bool) or not isinstance(v, (int, float, str)):
            raise InputError("SCHEMA", f"{what} entries must be numbers or rational strings", source, k)
    if any(isinstance(v, str) for v in flat):
        try:
            return exact_array(arr)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError("SCHEMA", f"bad rational in {what}: {exc}", source) from exc
    return arr.astype(float)


def report_number(v):
    """Report form: rationals stay exact strings, floats keep 12 significant digits."""
    if isinstance(v, Fraction):
        return encode_number(v)
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    v = float(v)
    if not np.isfinite(v):
        return str(v)
    return float(f"{v:.{SIG_DIGITS}g}")


def report_value(obj):
    if isinstance(obj, dict):
        return {str(k): report_value(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [report_value(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return report_value(obj.tolist())
    if obj is None or isinstance(obj, str):
        return obj
    return report_number(obj)


# ------------------------------------------------------------------- labels

def _encode_label(label):
    if isinstance(label, tuple):
        return [_encode_label(x) for x in label]
    if isinstance(label, (np.integer,)):
        return int(label)
    if isinstance(label, (np.floating,)):
        return float(label)
    return label


def _decode_label(label):
    if isinstance(label, list):
        return tuple(_decode_label(x) for x in label)
    return label


# ------------------------------------------------------------------- spaces

def space_to_dict(S) -> dict:
    space = S.space if isinstance(S, MetricMeasureSpace) else S
    out = {
        "labels": [_encode_label(l) for l in space.labels],
        "dist": encode_matrix(space.dist),
        "mesh": float(space.mesh),
    }
    if isinstance(S, MetricMeasureSpace):
        out["mass"] = encode_matrix(S.mass)
    return out


def space_from_dict(data, source=None, validate: bool = True, tolerance: float = 1e-9):
    if not isinstance(data, dict) or "dist" not in data:
        raise InputError("SCHEMA", "space object needs a 'dist' matrix", source)
    dist = decode_matrix(data["dist"], source, "dist")
    if dist.ndim != 2 or dist.shape[0] != dist.shape[1] or dist.shape[0] == 0:
        raise InputError("SCHEMA", f"dist must be a nonempty square matrix, got shape {dist.shape}", source)
    n = dist.shape[0]
    labels = data.get("labels", list(range(n)))
    if not isinstance(labels, list) or len(labels) != n:
        raise InputError("SCHEMA", "one label per point required", source)
    labels = tuple(_decode_label(l) for l in labels)
    if len(set(labels)) != n:
        raise InputError("SCHEMA", "labels must be distinct", source)
    mesh = data.get("mesh", 0.0)
    if not isinstance(mesh, (int, float)) or mesh < 0:
        raise InputError("SCHEMA", "mesh must be a nonnegative number", source)
    X = FiniteMetricSpace(labels, dist, float(mesh))
    if validate:
        rep = X.validate(tolerance)
        if rep.violations:
            raise InputError("METRIC_TRIANGLE", "triangle inequality fails", source, rep.first())
        for kind, where in rep.issues:
            raise InputError(f"METRIC_{kind.upper()}", f"{kind} axiom fails", source, where[0])
    if "mass" not in data:
        return X
    mass = decode_matrix(data["mass"], source, "mass")
    if mass.shape != (n,):
        raise InputError("SCHEMA", "mass vector length must match the space", source)
    if mass.dtype == object and dist.dtype != object:
        X = X.to_exact()
    elif dist.dtype == object and mass.dtype != object:
        mass = exact_array(mass)
    Xm = MetricMeasureSpace(X, mass)
    if validate:
        for code, index in Xm.check_mass():
            raise InputError(code, "measure must be a probability vector with full support", source, index)
    return Xm


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise InputError("FILE", "file not found", str(path)) from exc
    except json.JSONDecodeError as exc:
        raise InputError("SCHEMA", f"invalid JSON: {exc.msg}", str(path), (exc.lineno, exc.colno)) from exc


def load_space(path, validate: bool = True):
    return space_from_dict(read_json(path), str(path), validate)


def load_measure(path, n: int):
    data = read_json(path)
    weights = data.get("weights") if isinstance(data, dict) else data
    if weights is None:
        raise InputError("SCHEMA", "measure file needs a weight list", str(path))
    w = decode_matrix(weights, str(path), "weights")
    if w.shape != (n,):
        raise InputError("SCHEMA", f"measure needs {n} weights", str(path))
    if any(v < 0 for v in w.tolist()):
        raise InputError("NEGATIVE_MASS", "weights must be nonnegative", str(path), int(np.argmax(np.asarray(w, dtype=float) < 0)))
    if abs(float(sum(w.tolist())) - 1) > 1e-9:
        raise InputError("MASS_SUM", "weights must sum to 1", str(path))
    return w


def correspondence_to_dict(R: Correspondence) -> dict:
    return {"n": R.n, "m": R.m, "pairs": [list(p) for p in R.pairs]}


def correspondence_from_dict(data, source=None) -> Correspondence:
    try:
        return Correspondence(tuple(tuple(int(v) for v in p) for p in data["pairs"]), int(data["n"]), int(data["m"]))
    except (KeyError, TypeError) as exc:
        raise InputError("SCHEMA", "correspondence needs n, m and a pair list", source) from exc
    except ValueError as exc:
        raise InputError("CORRESPONDENCE", str(exc), source) from exc


def coupling_to_dict(cross, plan) -> dict:
    return {"cross": encode_matrix(cross), "plan": encode_matrix(plan)}


def coupling_from_dict(data, source=None):
    if not isinstance(data, dict) or "cross" not in data or "plan" not in data:
        raise InputError("SCHEMA", "coupling needs 'cross' and 'plan'", source)
    return decode_matrix(data["cross"], source, "cross"), decode_matrix(data["plan"], source, "plan")


def decode_time(v, source=None):
    return decode_matrix([v], source, "time")[0]


# ------------------------------------------------------------------- output

def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([report_number(v) if not isinstance(v, str) else v for v in row])
    return buf.getvalue()


def write_atomic(path, text: str) -> None:
    """Write to a temporary file in the target directory, then rename over the target."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
