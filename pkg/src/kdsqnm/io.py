"""CSV/JSON serialization of solved modes and flat ``key = value`` config files."""

from __future__ import annotations

import csv
import json
from importlib import resources

CSV_FIELDS = (
    "m", "l", "k", "a", "order", "re_omega", "im_omega", "residual", "iterations", "flags",
)


def _fmt(x):
    return format(float(x), ".17g")


def result_row(res):
    return {
        "m": res.m,
        "l": res.l,
        "k": res.k,
        "a": _fmt(res.a),
        "order": res.order,
        "re_omega": _fmt(res.omega.real),
        "im_omega": _fmt(res.omega.imag),
        "residual": _fmt(res.residual),
        "iterations": res.iterations,
        "flags": ";".join(res.flags),
    }


def write_csv(results, fh):
    writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for res in results:
        writer.writerow(result_row(res))


def read_csv(fh):
    """Parse rows written by :func:`write_csv`; floats round-trip exactly."""
    reader = csv.DictReader(fh)
    if tuple(reader.fieldnames or ()) != CSV_FIELDS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    rows = []
    for row in reader:
        rows.append({
            "m": int(row["m"]),
            "l": int(row["l"]),
            "k": int(row["k"]),
            "a": float(row["a"]),
            "order": int(row["order"]),
            "re_omega": float(row["re_omega"]),
            "im_omega": float(row["im_omega"]),
            "residual": float(row["residual"]),
            "iterations": int(row["iterations"]),
            "flags": [f for f in row["flags"].split(";") if f],
        })
    return rows


def params_dict(params):
    return {"M0": params.M0, "Lambda": params.Lambda, "a": params.a}


def compute_document(params, results, history=False):
    return {
        "kind": "compute",
        "params": params_dict(params),
        "results": [_result_json(r, history) for r in results],
    }


def sweep_document(params, branches, history=False):
    out = []
    for pts in branches:
        first = pts[0]
        out.append({
            "m": first.m,
            "l": first.l,
            "k": first.k,
            "truncated": any(not p.converged for p in pts),
            "points": [_result_json(p, history) for p in pts],
        })
    return {"kind": "sweep", "params": params_dict(params), "branches": out}


def _result_json(res, history):
    d = res.to_dict()
    if not history:
        d.pop("order_omegas")
    return d


def write_json(doc, fh):
    json.dump(doc, fh, indent=2, allow_nan=True)
    fh.write("\n")


def load_schema():
    text = resources.files("kdsqnm").joinpath("data/qnm_output.schema.json").read_text()
    return json.loads(text)


def read_config(path):
    """Flat config file: ``key = value`` per line, ``#`` starts a comment."""
    config = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            config[key.replace("-", "_")] = value
    return config
