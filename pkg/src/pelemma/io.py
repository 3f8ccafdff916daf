"""File formats: systems as JSON, signals and matrices as CSV, reports as JSON/CSV."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .lti import LtiSystem, as_signal


def json_default(o):
    """``default=`` hook for :func:`json.dumps` that unwraps numpy values."""
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"{type(o).__name__} is not JSON serializable")


def system_to_dict(sys: LtiSystem) -> dict[str, Any]:
    n, m, p = sys.dims
    return {
        "n": n,
        "m": m,
        "p": p,
        "A": sys.A.tolist(),
        "B": sys.B.tolist(),
        "C": sys.C.tolist(),
        "D": sys.D.tolist(),
    }


def system_from_dict(doc: dict[str, Any]) -> LtiSystem:
    try:
        n, m, p = int(doc["n"]), int(doc["m"]), int(doc["p"])
        shapes = {"A": (n, n), "B": (n, m), "C": (p, n), "D": (p, m)}
        mats = {}
        for key, shape in shapes.items():
            arr = np.asarray(doc[key], dtype=float)
            if arr.size == 0:
                arr = np.zeros(shape)
            mats[key] = arr.reshape(shape)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed system document: {exc}") from None
    except ValueError as exc:
        raise ValueError(f"system matrices do not match declared dims: {exc}") from None
    return LtiSystem(**mats)


def save_system(path, sys: LtiSystem) -> None:
    Path(path).write_text(json.dumps(system_to_dict(sys), indent=2) + "\n")


def load_system(path) -> LtiSystem:
    return system_from_dict(json.loads(Path(path).read_text()))


def write_signal(path, values) -> None:
    """CSV with header ``k,v0,...,v{q-1}``, one sample per row."""
    arr = as_signal(values)
    N, q = arr.shape
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k"] + [f"v{i}" for i in range(q)])
        for k in range(N):
            w.writerow([k] + [repr(float(v)) for v in arr[k]])


def read_signal(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty signal file")
    header, body = rows[0], [r for r in rows[1:] if r]
    if not header or header[0].strip() != "k":
        raise ValueError(f"{path}: first column must be 'k'")
    q = len(header) - 1
    data = np.empty((len(body), q))
    for i, row in enumerate(body):
        if len(row) != q + 1:
            raise ValueError(f"{path}: row {i} has {len(row)} fields, expected {q + 1}")
        if int(row[0]) != i:
            raise ValueError(f"{path}: sample index {row[0]} out of order at row {i}")
        data[i] = [float(v) for v in row[1:]]
    return as_signal(data, q)


def write_matrix(path, M, meta: dict[str, Any] | None = None) -> None:
    """Row-major CSV without header; ``meta`` goes to ``<path>.meta.json``."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in M:
            w.writerow([repr(float(v)) for v in row])
    record = {"rows": M.shape[0], "cols": M.shape[1]}
    if meta:
        record.update(meta)
    Path(str(path) + ".meta.json").write_text(json.dumps(record, indent=2) + "\n")


def read_matrix(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    return np.array([[float(v) for v in r] for r in rows], dtype=float)


def write_records(path, records: Iterable[dict[str, Any]], fmt: str = "json") -> None:
    records = list(records)
    if fmt == "json":
        Path(path).write_text(json.dumps(records, indent=2, sort_keys=True, default=json_default) + "\n")
    elif fmt == "csv":
        keys: list[str] = []
        for rec in records:
            for k in rec:
                if k not in keys:
                    keys.append(k)
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=keys)
            w.writeheader()
            for rec in records:
                w.writerow({k: _flat(v) for k, v in rec.items()})
    else:
        raise ValueError(f"unknown format {fmt!r}")


def _flat(v):
    if isinstance(v, (dict, list, tuple)):
        return json.dumps(v, sort_keys=True, default=json_default)
    return v
