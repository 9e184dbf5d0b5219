"""Datasets, models and meshes on disk.

Dataset CSV
    Header ``x1,...,xp,y`` then one row per sample, comma-delimited. Floats
    are written with Python's shortest round-trip repr, so reading back is
    bit-exact. Query files use the same layout; a trailing ``y`` column is
    allowed and ignored.

Mesh JSON
    ``{"dim": p, "vertices": [[...], ...], "simplices": [[...], ...]}``.

Mesh OFF
    ``OFF`` / counts line ``nv nf 0`` / ``nv`` vertex lines padded to three
    coordinates / ``nf`` facet lines ``k i0 ... ik-1``. A ``# dim d`` comment
    records the true coordinate count so padding is dropped on reading.
    Triangulation meshes (p = 2, 3) list simplices as ``p + 1``-vertex
    facets; lifted surfaces (p = 1, 2) store vertices ``(x, psi)``.

Model JSON (``format_version`` 1)
    ``format_version``, ``library``, ``library_version``, ``dim``, ``loss``,
    ``lambda``, ``points``, ``responses``, ``simplices``, ``psi``.
    Simplices are stored in mesh order, so a reloaded model locates queries
    in the same simplices and predicts bit-identical values.
"""
import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from . import __version__
from .errors import (
    EmptyDataset, IoError, ModelFormatError, ParseError, UnsupportedDimension,
)
from .optimizer import DtlModel, LossKind
from .pointset import PointSet
from .triangulation import Triangulation

MODEL_FORMAT_VERSION = 1


def _fmt(x):
    return repr(float(x))


def _open(path, mode):
    try:
        return open(path, mode, newline="" if "b" not in mode else None)
    except OSError as exc:
        raise IoError(f"cannot open {path}: {exc.strerror}") from exc


# -- datasets -----------------------------------------------------------------

def _parse_header(header, need_y):
    names = [h.strip() for h in header]
    has_y = bool(names) and names[-1] == "y"
    feats = names[:-1] if has_y else names
    if need_y and not has_y:
        raise ParseError("header must end with a 'y' column", row=1)
    if not feats:
        raise ParseError("header names no feature columns", row=1)
    for j, name in enumerate(feats):
        if name != f"x{j + 1}":
            raise ParseError(f"expected column 'x{j + 1}', got {name!r}", row=1, column=j + 1)
    return len(feats), has_y


def _read_table(path, need_y):
    with _open(path, "r") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise EmptyDataset("file is empty", row=1)
    p, has_y = _parse_header(rows[0], need_y)
    width = p + int(has_y)
    data = []
    for r, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != width:
            raise ParseError(f"expected {width} fields, got {len(row)}", row=r)
        vals = []
        for c, cell in enumerate(row, start=1):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"not a number: {cell!r}", row=r, column=c) from None
            if not math.isfinite(v):
                raise ParseError(f"non-finite value {cell!r}", row=r, column=c)
            vals.append(v)
        data.append(vals)
    if not data:
        raise EmptyDataset("no data rows", row=2)
    return np.array(data, dtype=np.float64).reshape(-1, width), p, has_y


def read_dataset(path):
    """Returns ``(PointSet, responses)`` with rows in file order."""
    A, p, _ = _read_table(path, need_y=True)
    y = A[:, p].copy()
    return PointSet(A[:, :p], y), y


def read_queries(path):
    """Feature matrix from a CSV with ``x1..xp`` and an optional ``y``."""
    A, p, _ = _read_table(path, need_y=False)
    return np.ascontiguousarray(A[:, :p])


def write_dataset(path, points, responses=None):
    if isinstance(points, PointSet):
        X = points.coords
        y = points.responses if responses is None else np.asarray(responses, dtype=np.float64)
    else:
        X = PointSet(points).coords
        y = None if responses is None else np.asarray(responses, dtype=np.float64)
    header = [f"x{j + 1}" for j in range(X.shape[1])]
    if y is not None:
        header.append("y")
    with _open(path, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(X.shape[0]):
            row = [_fmt(v) for v in X[i]]
            if y is not None:
                row.append(_fmt(y[i]))
            w.writerow(row)


# -- meshes -------------------------------------------------------------------

@dataclass(frozen=True)
class MeshData:
    dim: int
    vertices: np.ndarray
    simplices: np.ndarray

    def __eq__(self, other):
        return (isinstance(other, MeshData) and self.dim == other.dim
                and np.array_equal(self.vertices, other.vertices)
                and np.array_equal(self.simplices, other.simplices))


def _dump_json(path, obj):
    with _open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True, allow_nan=False)
        fh.write("\n")


def _load_json(path):
    with _open(path, "r") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", row=exc.lineno, column=exc.colno) from None


def _write_off(path, dim, V, S):
    with _open(path, "w") as fh:
        fh.write("OFF\n")
        fh.write(f"# dim {dim}\n")
        fh.write(f"{len(V)} {len(S)} 0\n")
        for v in V:
            pad = list(v) + [0.0] * (3 - len(v))
            fh.write(" ".join(_fmt(c) for c in pad) + "\n")
        for s in S:
            fh.write(" ".join([str(len(s))] + [str(int(i)) for i in s]) + "\n")


def _read_off(path):
    with _open(path, "r") as fh:
        lines = fh.read().splitlines()
    dim = 3
    body = []
    for ln, text in enumerate(lines, start=1):
        t = text.strip()
        if t.startswith("#"):
            parts = t[1:].split()
            if len(parts) == 2 and parts[0] == "dim":
                dim = int(parts[1])
            continue
        if t:
            body.append((ln, t))
    if not body or body[0][1] != "OFF":
        raise ParseError("missing OFF header", row=1)
    if len(body) < 2:
        raise ParseError("missing counts line", row=body[0][0] + 1)
    ln, counts = body[1]
    try:
        nv, nf = (int(c) for c in counts.split()[:2])
    except ValueError:
        raise ParseError("bad counts line", row=ln) from None
    if len(body) < 2 + nv + nf:
        raise ParseError("file truncated", row=body[-1][0])
    V = []
    for ln, t in body[2:2 + nv]:
        try:
            V.append([float(c) for c in t.split()[:3]])
        except ValueError:
            raise ParseError("bad vertex line", row=ln) from None
    S = []
    for ln, t in body[2 + nv:2 + nv + nf]:
        parts = t.split()
        k = int(parts[0])
        if len(parts) != k + 1:
            raise ParseError("facet vertex count does not match", row=ln)
        ids = [int(i) for i in parts[1:]]
        if any(i < 0 or i >= nv for i in ids):
            raise ParseError("facet index out of range", row=ln)
        S.append(ids)
    V = np.array(V, dtype=np.float64).reshape(-1, 3)[:, :dim]
    k = len(S[0]) if S else 0
    if any(len(s) != k for s in S):
        raise ParseError("facets have mixed vertex counts")
    return MeshData(dim, np.ascontiguousarray(V), np.array(S, dtype=np.int64).reshape(-1, k))


def _mesh_from_json(obj):
    try:
        dim = int(obj["dim"])
        V = np.array(obj["vertices"], dtype=np.float64).reshape(-1, dim)
        S = np.array(obj["simplices"], dtype=np.int64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed mesh JSON: {exc}") from None
    if S.size and (S.min() < 0 or S.max() >= len(V)):
        raise ParseError("simplex index out of range")
    return MeshData(dim, V, S.reshape(len(S), -1) if S.size else S.reshape(0, dim + 1))


def _format_of(path, fmt):
    if fmt is None:
        fmt = "off" if str(path).lower().endswith(".off") else "json"
    if fmt not in ("off", "json"):
        raise ValueError(f"unknown mesh format {fmt!r}")
    return fmt


def write_mesh(tri, path, format=None):
    """The triangulation itself: OFF for p in {2, 3}, JSON for any p."""
    fmt = _format_of(path, format)
    if fmt == "off":
        if tri.dim not in (2, 3):
            raise UnsupportedDimension(f"OFF meshes need p in {{2, 3}}, got p={tri.dim}")
        _write_off(path, tri.dim, tri.points, tri.simplices)
    else:
        _dump_json(path, {"dim": tri.dim, "vertices": tri.points.tolist(),
                          "simplices": tri.simplices.tolist()})


def write_surface_mesh(model, path, format=None):
    """The lifted surface ``(x_i, psi_i)``: OFF for p in {1, 2}, JSON for any p."""
    fmt = _format_of(path, format)
    V = np.column_stack([model.tri.points, model.psi])
    if fmt == "off":
        if model.dim > 2:
            raise UnsupportedDimension(f"a lifted OFF surface needs p <= 2, got p={model.dim}")
        _write_off(path, model.dim + 1, V, model.tri.simplices)
    else:
        _dump_json(path, {"dim": model.dim + 1, "vertices": V.tolist(),
                          "simplices": model.tri.simplices.tolist()})


def read_mesh(path, format=None):
    """Read an OFF or JSON mesh written by :func:`write_mesh` or
    :func:`write_surface_mesh`; returns MeshData."""
    fmt = _format_of(path, format)
    if fmt == "off":
        return _read_off(path)
    return _mesh_from_json(_load_json(path))


read_surface_mesh = read_mesh


# -- models -------------------------------------------------------------------

def model_to_dict(model):
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "library": "dtl",
        "library_version": __version__,
        "dim": model.dim,
        "loss": LossKind(model.loss).value,
        "lambda": float(model.lam),
        "points": model.tri.points.tolist(),
        "responses": np.asarray(model.responses, dtype=np.float64).tolist(),
        "simplices": model.tri.simplices.tolist(),
        "psi": np.asarray(model.psi, dtype=np.float64).tolist(),
    }


def model_from_dict(obj):
    if not isinstance(obj, dict) or "format_version" not in obj:
        raise ModelFormatError("not a model file (no format_version)")
    if obj["format_version"] != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model format_version {obj['format_version']!r}")
    try:
        dim = int(obj["dim"])
        P = np.array(obj["points"], dtype=np.float64).reshape(-1, dim)
        y = np.array(obj["responses"], dtype=np.float64)
        psi = np.array(obj["psi"], dtype=np.float64)
        S = np.array(obj["simplices"], dtype=np.int64).reshape(-1, dim + 1)
        loss = LossKind(obj["loss"])
        lam = float(obj["lambda"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model: {exc}") from None
    if psi.shape != (len(P),) or y.shape != (len(P),):
        raise ModelFormatError("psi/responses length does not match points")
    try:
        tri = Triangulation.from_simplices(P, S, canonical=False)
    except ValueError as exc:
        raise ModelFormatError(f"invalid mesh in model: {exc}") from None
    return DtlModel(PointSet(P, y), y, tri, psi, loss, lam)


def save_model(model, path):
    _dump_json(path, model_to_dict(model))


def load_model(path):
    return model_from_dict(_load_json(path))
