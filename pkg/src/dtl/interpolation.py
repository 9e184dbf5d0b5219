"""Piecewise-linear interpolant over a triangulation and its simplex gradients.

Inside the convex hull the value at ``x`` is the barycentric combination of
``psi`` over the covering simplex. Outside the hull it is ``psi`` at the
nearest training point, so the function jumps at the hull boundary.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSimplex, OnFacetError, OutsideHullError
from .predicates import orient_ids
from .triangulation import BOUNDARY_TOL, as_coords, locate_many


def simplex_gradient(points, simplex, psi, anchor=0):
    """Gradient of the affine function through ``(x_j, psi_j)`` on one simplex.

    Solves ``D_x G = D_psi`` where the rows of ``D_x`` are ``x_a - x_j`` for
    the anchor vertex ``a`` and every other vertex ``j``.
    """
    P = as_coords(points)
    verts = np.asarray(simplex, dtype=np.int64).reshape(-1)
    if orient_ids(P, verts.tolist()) == 0:
        raise DegenerateSimplex("simplex vertices are affinely dependent")
    psi = np.asarray(psi, dtype=np.float64)
    others = np.delete(verts, anchor)
    a = verts[anchor]
    dx = P[a] - P[others]
    dpsi = psi[a] - psi[others]
    return np.linalg.solve(dx, dpsi)


def up_norm(G):
    """Unit normal ``(-G, 1) / |(-G, 1)|`` of a lifted simplex (last entry > 0)."""
    G = np.asarray(G, dtype=np.float64)
    v = np.concatenate([-G, np.ones(G.shape[:-1] + (1,))], axis=-1)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


@dataclass(frozen=True)
class SimplexGeometry:
    """Psi-dependent per-simplex quantities for a whole mesh.

    gradients : (m, p)
    up_norms : (m, p + 1)
    lengths : (m,) norms of ``(-G, 1)`` before normalization
    """

    gradients: np.ndarray
    up_norms: np.ndarray
    lengths: np.ndarray


def simplex_geometry(tri, psi):
    psi = np.asarray(psi, dtype=np.float64)
    G = np.einsum("mjp,mj->mp", tri.bary_gradients, psi[tri.simplices])
    v = np.concatenate([-G, np.ones((G.shape[0], 1))], axis=1)
    r = np.sqrt(1.0 + np.einsum("mp,mp->m", G, G))
    return SimplexGeometry(G, v / r[:, None], r)


def evaluate_many(tri, psi, queries):
    sid, bary, nearest = locate_many(tri, queries)
    psi = np.asarray(psi, dtype=np.float64)
    out = psi[nearest].astype(np.float64)
    inside = sid >= 0
    if np.any(inside):
        vals = psi[tri.simplices[sid[inside]]]
        out[inside] = np.einsum("kj,kj->k", bary[inside], vals)
    return out


def evaluate(model, query):
    """Value of the fitted surface at a single query point."""
    q = np.asarray(query, dtype=np.float64).reshape(1, -1)
    return float(evaluate_many(model.tri, model.psi, q)[0])


def evaluate_gradient_many(tri, psi, queries):
    """Gradients at interior points; NaN rows where undefined."""
    sid, bary, _ = locate_many(tri, queries)
    out = np.full((len(sid), tri.dim), np.nan)
    ok = (sid >= 0)
    ok[ok] = bary[ok].min(axis=1) > BOUNDARY_TOL
    if np.any(ok):
        geo_psi = np.asarray(psi, dtype=np.float64)[tri.simplices[sid[ok]]]
        out[ok] = np.einsum("kjp,kj->kp", tri.bary_gradients[sid[ok]], geo_psi)
    return out, sid


def evaluate_gradient(model, query):
    """Gradient of the covering simplex's affine piece.

    Raises OutsideHullError outside the hull (the fallback is constant) and
    OnFacetError on a shared face, where the gradient is ambiguous.
    """
    q = np.asarray(query, dtype=np.float64).reshape(1, -1)
    g, sid = evaluate_gradient_many(model.tri, model.psi, q)
    if sid[0] < 0:
        raise OutsideHullError("gradient undefined outside the convex hull")
    if np.isnan(g[0, 0]):
        raise OnFacetError("query lies on a face shared by several simplices")
    return g[0]
