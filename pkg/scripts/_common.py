import argparse
import csv
import json
from pathlib import Path


def parser(description):
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("--out", default="results", help="output directory")
    return ap


def write_rows(out, name, header, rows):
    path = Path(out) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


def write_json(out, name, obj):
    path = Path(out) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, default=str))
    return path
