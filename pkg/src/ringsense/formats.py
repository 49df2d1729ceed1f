"""Versioned on-disk formats.

Every file starts with a format tag and readers refuse tags they do not
know.  Floats are written with 17 significant digits so that a write/read
cycle is exact.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .dynarray import RingSampleSet
from .errors import MissingInputError, SchemaError
from .features import FEATURE_NAMES

GRID_TAG = "MWGRID1"
RING_TAG = "#RINGCSV1"
FEAT_TAG = "#FEATCSV1"
MC_TAG = "#MCREPORT1"
ROC_TAG = "#ROCCSV1"

RING_COLUMNS = ("k", "gamma_deg", "u", "v", "re", "im", "baseline_lambda")
FEAT_COLUMNS = FEATURE_NAMES + ("magnitude", "label", "source_id")
MC_COLUMNS = ("classifier", "metric", "mean", "std", "iters", "seed")
ROC_COLUMNS = ("classifier", "iteration", "fpr", "tpr")

_DTYPES = {"f64": np.dtype("<f8"), "c128": np.dtype("<c16")}


def fmt(x) -> str:
    return format(float(x), ".17g")


def _open_text(path):
    path = Path(path)
    if not path.is_file():
        raise MissingInputError(f"input file not found: {path}")
    return path.read_text()


# -- grids -------------------------------------------------------------------

def write_grid(path, values, axis0, axis1):
    """Row-major grid; ``axis0`` runs along rows, ``axis1`` along columns."""
    values = np.asarray(values)
    dtype = "c128" if np.iscomplexobj(values) else "f64"
    rows, cols = values.shape
    header = (f"{GRID_TAG}\ndtype={dtype}\nrows={rows}\ncols={cols}\n"
              f"axis0={fmt(axis0[0])} {fmt(axis0[-1])}\naxis1={fmt(axis1[0])} {fmt(axis1[-1])}\n\n")
    payload = np.ascontiguousarray(values, dtype=_DTYPES[dtype]).tobytes()
    Path(path).write_bytes(header.encode("ascii") + payload)


def read_grid(path) -> tuple:
    """Return ``(values, axis0, axis1)``; axes are rebuilt from their end points."""
    path = Path(path)
    if not path.is_file():
        raise MissingInputError(f"input file not found: {path}")
    raw = path.read_bytes()
    head, sep, payload = raw.partition(b"\n\n")
    if not sep:
        raise SchemaError("grid header is not terminated by a blank line", column="header")
    lines = head.decode("ascii", errors="replace").split("\n")
    if lines[0] != GRID_TAG:
        raise SchemaError(f"unknown grid format tag {lines[0]!r}", column="format")
    fields = {}
    for line in lines[1:]:
        key, eq, val = line.partition("=")
        if not eq:
            raise SchemaError(f"malformed header line {line!r}", column="header")
        fields[key] = val
    for key in ("dtype", "rows", "cols", "axis0", "axis1"):
        if key not in fields:
            raise SchemaError(f"grid header lacks {key}", column=key)
    if fields["dtype"] not in _DTYPES:
        raise SchemaError(f"unknown dtype {fields['dtype']!r}", column="dtype")
    try:
        rows, cols = int(fields["rows"]), int(fields["cols"])
        ax = [tuple(map(float, fields[k].split())) for k in ("axis0", "axis1")]
    except ValueError as err:
        raise SchemaError(f"bad grid header value: {err}", column="header") from err
    dt = _DTYPES[fields["dtype"]]
    if len(payload) != rows * cols * dt.itemsize or any(len(a) != 2 for a in ax):
        raise SchemaError("grid payload size does not match the header", column="payload")
    values = np.frombuffer(payload, dtype=dt).reshape(rows, cols).astype(dt.newbyteorder("="))
    axis0 = np.linspace(ax[0][0], ax[0][1], rows)
    axis1 = np.linspace(ax[1][0], ax[1][1], cols)
    return values, axis0, axis1


# -- CSV helpers -------------------------------------------------------------

def _write_csv(path, tag, columns, rows):
    buf = io.StringIO()
    buf.write(tag + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    Path(path).write_text(buf.getvalue())


def _read_csv(path, tag, columns) -> list:
    text = _open_text(path)
    lines = text.splitlines()
    if not lines or lines[0] != tag:
        found = lines[0] if lines else ""
        raise SchemaError(f"expected format tag {tag!r}, found {found!r}", column="format")
    reader = csv.reader(lines[1:])
    header = next(reader, None)
    if header is None:
        raise SchemaError("missing header row", column="header")
    for i, want in enumerate(columns):
        got = header[i] if i < len(header) else None
        if got != want:
            raise SchemaError(f"column {i} should be {want!r}, found {got!r}", column=want)
    if len(header) > len(columns):
        raise SchemaError(f"unexpected column {header[len(columns)]!r}", column=header[len(columns)])
    rows = []
    for n, row in enumerate(reader, start=3):
        if len(row) != len(columns):
            raise SchemaError(f"line {n} has {len(row)} fields, expected {len(columns)}",
                              column="row")
        rows.append(row)
    return rows


def _floats(rows, i, name):
    try:
        return np.array([float(r[i]) for r in rows])
    except ValueError as err:
        raise SchemaError(f"non-numeric value in column {name}", column=name) from err


# -- ring samples ------------------------------------------------------------

def write_ring(path, samples: RingSampleSet):
    rows = [(int(k), fmt(math.degrees(g)), fmt(u), fmt(v), fmt(z.real), fmt(z.imag), fmt(b))
            for k, g, u, v, z, b in zip(samples.k, samples.gamma, samples.u, samples.v,
                                        samples.value, samples.baseline)]
    _write_csv(path, RING_TAG, RING_COLUMNS, rows)


def read_ring(path) -> RingSampleSet:
    rows = _read_csv(path, RING_TAG, RING_COLUMNS)
    if not rows:
        raise SchemaError("ring file has no samples", column="k")
    cols = {name: _floats(rows, i, name) for i, name in enumerate(RING_COLUMNS)}
    k = cols["k"]
    if np.any(k != np.round(k)):
        raise SchemaError("k must be an integer", column="k")
    base = cols["baseline_lambda"]
    # rings are numbered by first appearance of their baseline
    _, first, inverse = np.unique(base, return_index=True, return_inverse=True)
    ring = np.argsort(np.argsort(first))[inverse]
    return RingSampleSet(ring, k.astype(int), np.radians(cols["gamma_deg"]), cols["u"], cols["v"],
                         cols["re"] + 1j * cols["im"], base)


# -- feature sets ------------------------------------------------------------

def write_features(path, features, labels, source_id, magnitudes=None):
    features = np.atleast_2d(np.asarray(features, dtype=float))
    mags = np.full(len(features), np.nan) if magnitudes is None else np.asarray(magnitudes)
    rows = [[fmt(v) for v in f] + [fmt(m), int(y), s]
            for f, m, y, s in zip(features, mags, labels, source_id)]
    _write_csv(path, FEAT_TAG, FEAT_COLUMNS, rows)


def read_features(path):
    """Return a LabeledDataset of the raw feature rows."""
    from .classify.dataset import LabeledDataset

    rows = _read_csv(path, FEAT_TAG, FEAT_COLUMNS)
    if not rows:
        raise SchemaError("feature file has no rows", column="label")
    x = np.column_stack([_floats(rows, i, n) for i, n in enumerate(FEATURE_NAMES)])
    labels = _floats(rows, len(FEATURE_NAMES) + 1, "label")
    if not np.isin(labels, (0, 1)).all():
        raise SchemaError("labels must be 0 or 1", column="label")
    return LabeledDataset(x, labels.astype(int), tuple(r[-1] for r in rows))


# -- reports -----------------------------------------------------------------

def write_mc_report(path, report):
    rows = []
    for name in report.names:
        mean, std = report.mean(name), report.std(name)
        for metric in mean:
            rows.append((name, metric, fmt(mean[metric]), fmt(std[metric]), report.iters, report.seed))
    _write_csv(path, MC_TAG, MC_COLUMNS, rows)


def read_mc_report(path) -> list:
    return [dict(zip(MC_COLUMNS, r)) for r in _read_csv(path, MC_TAG, MC_COLUMNS)]


def write_roc_points(path, report):
    rows = []
    for name in report.names:
        for it, (f, t) in enumerate(report.points(name)):
            rows.append((name, it, fmt(f), fmt(t)))
    _write_csv(path, ROC_TAG, ROC_COLUMNS, rows)


def read_roc_points(path) -> list:
    return [dict(zip(ROC_COLUMNS, r)) for r in _read_csv(path, ROC_TAG, ROC_COLUMNS)]


# -- JSON --------------------------------------------------------------------

def _encode(obj) -> str:
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            return "null"
        return fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dump_json(path, obj):
    """JSON with floats at 17 significant digits; non-finite floats become null."""
    Path(path).write_text(_encode(obj) + "\n")


def load_json(path, tag: str | None = None) -> dict:
    text = _open_text(path)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as err:
        raise SchemaError(f"invalid JSON: {err}", column="json") from err
    if tag is not None and (not isinstance(obj, dict) or obj.get("format") != tag):
        found = obj.get("format") if isinstance(obj, dict) else None
        raise SchemaError(f"expected format {tag!r}, found {found!r}", column="format")
    return obj
