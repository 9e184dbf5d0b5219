"""Robust orientation and in-circumsphere predicates.

Each predicate first evaluates its determinant in double precision together
with a forward error bound (``_backend.kernels``). When the bound cannot
certify the sign, the determinant is recomputed exactly: every double is a
dyadic rational, so scaling all coordinates by a common power of two turns
the matrix into Python integers and Bareiss elimination gives the exact
value.

``insphere_sos`` additionally resolves exact ties (cospherical points) by
symbolic perturbation of the lifting map: point ``i`` is lifted by
``eps_i`` with ``eps_0 >> eps_1 >> ...``, so the lowest index decides.
"""
from enum import IntEnum
from fractions import Fraction

import numpy as np

from . import _backend
from .errors import DegenerateSimplex, DimensionMismatch, InvalidInput


class Sign(IntEnum):
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1


def _sign(v):
    return (v > 0) - (v < 0)


def _bareiss_det(m):
    """Exact determinant of a square integer matrix (list of lists)."""
    a = [row[:] for row in m]
    k = len(a)
    sign = 1
    prev = 1
    for i in range(k - 1):
        if a[i][i] == 0:
            for r in range(i + 1, k):
                if a[r][i] != 0:
                    a[i], a[r] = a[r], a[i]
                    sign = -sign
                    break
            else:
                return 0
        piv = a[i][i]
        for r in range(i + 1, k):
            ar = a[r]
            ai = a[i]
            f = ar[i]
            for c in range(i + 1, k):
                ar[c] = (ar[c] * piv - f * ai[c]) // prev
            ar[i] = 0
        prev = piv
    return sign * a[k - 1][k - 1]


def _as_ints(rows):
    """Scale dyadic rational coordinates to integers by one common factor."""
    ratios = [[float(v).as_integer_ratio() for v in row] for row in rows]
    den = max(d for row in ratios for _, d in row)
    return [[n * (den // d) for n, d in row] for row in ratios]


def exact_orient(P, ids):
    pts = _as_ints([P[i] for i in ids])
    x0 = pts[0]
    m = [[a - b for a, b in zip(pts[j], x0)] for j in range(1, len(pts))]
    return _sign(_bareiss_det(m))


def _insphere_rows(P, ids, q):
    pts = _as_ints([P[i] for i in ids] + [P[q]])
    xq = pts[-1]
    rows = []
    for pt in pts[:-1]:
        d = [a - b for a, b in zip(pt, xq)]
        d.append(sum(v * v for v in d))
        rows.append(d)
    return rows, pts


def exact_insphere_det(P, ids, q):
    rows, _ = _insphere_rows(P, ids, q)
    return _sign(_bareiss_det(rows))


def orient_ids(P, ids):
    """Exact orientation sign of the points ``P[ids]`` (p + 1 rows)."""
    s = _backend.kernels.orient_filter(P, ids)
    if s:
        return s
    return exact_orient(P, ids)


def insphere_det_ids(P, ids, q):
    """Exact sign of the lifted in-sphere determinant (orientation not applied)."""
    s = _backend.kernels.insphere_filter(P, ids, q)
    if s:
        return s
    return exact_insphere_det(P, ids, q)


def _perturbed_sign(P, ids, q):
    """Sign of the lifted determinant under index-ordered symbolic lifting."""
    rows, pts = _insphere_rows(P, ids, q)
    det = _bareiss_det(rows)
    if det:
        return _sign(det)
    order = list(ids) + [q]
    p = len(pts[0])
    # d det / d h_k is the cofactor of the lifting column, i.e. the signed
    # determinant of rows [x_l, 1] over the other p + 1 points.
    for k in sorted(range(len(order)), key=order.__getitem__):
        minor = [pt + [1] for t, pt in enumerate(pts) if t != k]
        c = _bareiss_det(minor)
        if c:
            return _sign(c) * (-1 if (k + p) % 2 else 1)
    raise DegenerateSimplex("all perturbation cofactors vanish")


def _canonical_insphere_sign(p):
    eye = np.vstack([np.zeros(p), np.eye(p), np.full(p, 1.0 / (2 * (p + 1)))])
    return exact_insphere_det(eye, list(range(p + 1)), p + 1)


# inside <=> _INSIDE[p] * orient * det > 0
_INSIDE = {p: _canonical_insphere_sign(p) for p in range(1, 6)}


def insphere_ids(P, ids, q):
    """Exact in-circumsphere sign for the simplex ``P[ids]``; +1 inside.

    Assumes ``P[ids]`` is positively oriented.
    """
    p = P.shape[1]
    return _INSIDE[p] * insphere_det_ids(P, ids, q)


def insphere_sos(P, ids, q):
    """Like :func:`insphere_ids` but never zero: ties broken symbolically.

    Indices into ``P`` are the perturbation order, so callers must pass the
    training points' original indices.
    """
    p = P.shape[1]
    s = _backend.kernels.insphere_filter(P, ids, q)
    if s:
        return _INSIDE[p] * s
    return _INSIDE[p] * _perturbed_sign(P, ids, q)


def _stack(simplex_vertices, query=None):
    S = np.asarray(simplex_vertices, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1] + 1:
        raise DimensionMismatch(f"need p+1 points of dimension p, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise InvalidInput("coordinates must be finite")
    if query is None:
        return np.ascontiguousarray(S)
    qv = np.asarray(query, dtype=np.float64).reshape(-1)
    if qv.shape[0] != S.shape[1]:
        raise DimensionMismatch(f"query has dimension {qv.shape[0]}, simplex has {S.shape[1]}")
    if not np.all(np.isfinite(qv)):
        raise InvalidInput("coordinates must be finite")
    return np.ascontiguousarray(np.vstack([S, qv]))


def orient(simplex_vertices, dim=None):
    """Orientation of p+1 points in R^p.

    Sign of det[v_1 - v_0, ..., v_p - v_0]; ZERO exactly when the points are
    affinely dependent.
    """
    P = _stack(simplex_vertices)
    if dim is not None and dim != P.shape[1]:
        raise DimensionMismatch(f"expected dimension {dim}, got {P.shape[1]}")
    return Sign(orient_ids(P, list(range(P.shape[0]))))


def in_circumsphere(simplex_vertices, query):
    """POSITIVE iff ``query`` is strictly inside the simplex's circumsphere.

    ZERO means exactly on the sphere; no perturbation is applied here.
    Orientation of the input is normalized internally.
    """
    P = _stack(simplex_vertices, query)
    k = P.shape[0] - 1
    ids = list(range(k))
    o = orient_ids(P, ids)
    if o == 0:
        raise DegenerateSimplex("simplex vertices are affinely dependent")
    return Sign(o * insphere_ids(P, ids, k))


def solve_barycentric(simplex_vertices, query):
    """Barycentric coordinates of ``query`` with respect to the simplex.

    Solved by LU with partial pivoting on the edge matrix. Entries may be
    negative outside the simplex.
    """
    P = _stack(simplex_vertices, query)
    k = P.shape[0] - 1
    if orient_ids(P, list(range(k))) == 0:
        raise DegenerateSimplex("simplex vertices are affinely dependent")
    return barycentric_unchecked(P[:k], P[k])


def barycentric_unchecked(S, q):
    A = (S[1:] - S[0]).T
    rhs = q - S[0]
    mu = np.linalg.solve(A, rhs)
    # one step of iterative refinement
    mu = mu + np.linalg.solve(A, rhs - A @ mu)
    return np.concatenate([[1.0 - mu.sum()], mu])


def exact_barycentric(simplex_vertices, query):
    """Exact rational barycentric coordinates (test oracle helper)."""
    S = [[Fraction(float(v)) for v in row] for row in np.asarray(simplex_vertices)]
    q = [Fraction(float(v)) for v in np.asarray(query)]
    p = len(q)
    # augmented system: rows are coordinates plus the sum-to-one constraint
    a = [[S[j][r] for j in range(p + 1)] + [q[r]] for r in range(p)]
    a.append([Fraction(1)] * (p + 1) + [Fraction(1)])
    n = p + 1
    for i in range(n):
        piv = next(r for r in range(i, n) if a[r][i] != 0)
        a[i], a[piv] = a[piv], a[i]
        for r in range(n):
            if r != i and a[r][i] != 0:
                f = a[r][i] / a[i][i]
                a[r] = [x - f * y for x, y in zip(a[r], a[i])]
    return [a[i][n] / a[i][i] for i in range(n)]
