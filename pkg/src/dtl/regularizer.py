"""Total discrete curvature penalty and its gradient in psi.

For every vertex, the penalty is one minus the mean pairwise cosine between
the up-normals of all simplices incident to it, summed over vertices. A
vertex touching a single simplex has no pair and contributes zero.

For unit vectors ``1 - <a, b> = |a - b|^2 / 2``; both the value and the
gradient use the difference form, which does not cancel catastrophically
when normals are nearly parallel (the flat, low-penalty regime).

In the gradient, pairs whose normals differ by less than ``FLAT_TOL``
(about 1e-10 rad) count as parallel. That is the round-off floor of normals
computed from rounded data; below it the "gradient" is noise, and Adam's
scale-free step would turn noise into moves of size ``step * g / (|g| + eps)``.
"""
from dataclasses import dataclass
from weakref import WeakKeyDictionary

import numpy as np

from .interpolation import simplex_geometry

FLAT_TOL = 1e-10

_PAIRS = WeakKeyDictionary()


@dataclass(frozen=True)
class CurvatureReport:
    per_vertex: np.ndarray
    total: float
    angle_per_vertex: np.ndarray


def incident_pairs(tri):
    """All pairs k < j of simplices sharing a vertex, with per-pair weights.

    Returns ``(vertex, k, j, weight)`` arrays where weight is 1 / C(|N(v)|, 2).
    """
    cached = _PAIRS.get(tri)
    if cached is not None:
        return cached
    vs, ks, js, ws = [], [], [], []
    for v, inc in enumerate(tri.vertex_to_incident):
        c = len(inc)
        if c < 2:
            continue
        a, b = np.triu_indices(c, k=1)
        vs.append(np.full(len(a), v, dtype=np.int64))
        ks.append(inc[a])
        js.append(inc[b])
        ws.append(np.full(len(a), 2.0 / (c * (c - 1))))
    if vs:
        out = tuple(np.concatenate(x) for x in (vs, ks, js, ws))
    else:
        e = np.zeros(0, dtype=np.int64)
        out = (e, e, e, np.zeros(0))
    _PAIRS[tri] = out
    return out


def regularization_value(tri, psi, geometry=None):
    geo = geometry if geometry is not None else simplex_geometry(tri, psi)
    v, k, j, w = incident_pairs(tri)
    N = geo.up_norms
    d = N[k] - N[j]
    half_sq = 0.5 * np.einsum("ij,ij->i", d, d)
    per_vertex = np.bincount(v, weights=w * half_sq, minlength=tri.n_points)
    cos = np.clip(1.0 - half_sq, -1.0, 1.0)
    angles = np.bincount(v, weights=w * np.arccos(cos), minlength=tri.n_points)
    return CurvatureReport(per_vertex, float(per_vertex.sum()), angles)


def value_and_gradient(tri, psi, geometry=None):
    """Penalty and its gradient with respect to psi (length n)."""
    geo = geometry if geometry is not None else simplex_geometry(tri, psi)
    v, k, j, w = incident_pairs(tri)
    N = geo.up_norms
    m, p1 = N.shape
    d = N[k] - N[j]
    sq = np.einsum("ij,ij->i", d, d)
    total = float(np.sum(w * 0.5 * sq))
    # dR/dN, with N treated as free vectors
    wd = np.where(sq > FLAT_TOL ** 2, w, 0.0)[:, None] * d
    gN = np.empty_like(N)
    for c in range(p1):
        gN[:, c] = (np.bincount(k, weights=wd[:, c], minlength=m)
                    - np.bincount(j, weights=wd[:, c], minlength=m))
    # dN/dG_b = -(I - N N^T) e_b / r
    proj = gN - N * np.einsum("mc,mc->m", N, gN)[:, None]
    gG = -proj[:, :-1] / geo.lengths[:, None]
    contrib = np.einsum("mjp,mp->mj", tri.bary_gradients, gG)
    grad = np.bincount(tri.simplices.reshape(-1), weights=contrib.reshape(-1),
                       minlength=tri.n_points)
    return total, grad


def regularization_gradient(tri, psi):
    return value_and_gradient(tri, psi)[1]
