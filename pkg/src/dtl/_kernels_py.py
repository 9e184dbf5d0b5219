"""Pure-Python hot kernels.

Same call surface as the compiled ``dtl._kernels`` module; ``dtl._backend``
picks one at import. Every function here must return exactly what the
compiled version returns for the same inputs.

The two filters return +1/-1 only when the floating-point determinant is
certified by a forward error bound, and 0 when the caller has to fall back
to exact arithmetic.
"""
import math

import numpy as np

EPS = 2.0 ** -53
# Below this the relative error model breaks down (gradual underflow).
TINY = 1e-250


def _det_perm(a, k):
    """Determinant and permanent of |a| by cofactor expansion (k <= 5)."""
    if k == 1:
        return a[0][0], abs(a[0][0])
    if k == 2:
        p = a[0][0] * a[1][1]
        q = a[0][1] * a[1][0]
        return p - q, abs(p) + abs(q)
    det = 0.0
    perm = 0.0
    row = a[0]
    sign = 1.0
    for j in range(k):
        minor = [r[:j] + r[j + 1:] for r in a[1:]]
        d, pm = _det_perm(minor, k - 1)
        det += sign * row[j] * d
        perm += abs(row[j]) * pm
        sign = -sign
    return det, perm


def _certify(det, perm, k, entry_err):
    bound = (k * (entry_err + 2.0) + 4.0) * 4.0 * EPS * perm
    if perm < TINY:
        return 0
    if det > bound:
        return 1
    if det < -bound:
        return -1
    return 0


def orient_filter(P, ids):
    """Certified sign of det[x_j - x_0], j = 1..p, or 0 if uncertain."""
    p = P.shape[1]
    x0 = P[ids[0]]
    if p == 2:
        ax, ay = x0[0], x0[1]
        b = P[ids[1]]
        c = P[ids[2]]
        bx = b[0] - ax
        by = b[1] - ay
        cx = c[0] - ax
        cy = c[1] - ay
        l = bx * cy
        r = by * cx
        return _certify(l - r, abs(l) + abs(r), 2, 1.0)
    rows = [(P[ids[j]] - x0).tolist() for j in range(1, p + 1)]
    det, perm = _det_perm(rows, p)
    return _certify(det, perm, p, 1.0)


def insphere_filter(P, ids, q):
    """Certified sign of det[x_j - q, |x_j - q|^2], j = 0..p, or 0."""
    p = P.shape[1]
    xq = P[q]
    if p == 2:
        qx, qy = xq[0], xq[1]
        a = P[ids[0]]
        b = P[ids[1]]
        c = P[ids[2]]
        ax = a[0] - qx
        ay = a[1] - qy
        bx = b[0] - qx
        by = b[1] - qy
        cx = c[0] - qx
        cy = c[1] - qy
        al = ax * ax + ay * ay
        bl = bx * bx + by * by
        cl = cx * cx + cy * cy
        bc = bx * cy - by * cx
        ca = cx * ay - cy * ax
        ab = ax * by - ay * bx
        det = al * bc + bl * ca + cl * ab
        perm = (al * (abs(bx * cy) + abs(by * cx))
                + bl * (abs(cx * ay) + abs(cy * ax))
                + cl * (abs(ax * by) + abs(ay * bx)))
        return _certify(det, perm, 3, p + 3.0)
    rows = []
    for j in ids:
        d = (P[j] - xq).tolist()
        d.append(math.fsum(v * v for v in d))
        rows.append(d)
    det, perm = _det_perm(rows, p + 1)
    return _certify(det, perm, p + 1, p + 3.0)


def walk(T, X0, neighbors, start, q, max_steps, tol):
    """Barycentric visibility walk toward ``q`` over a finished mesh.

    Returns ``(simplex, code, facet)``: code 0 means ``q`` is inside
    ``simplex`` up to ``tol``; code 1 means the walk wanted to leave the mesh
    through hull ``facet`` of ``simplex``; code 2 means the step budget ran out.
    """
    s = start
    prev = -1
    for _ in range(max_steps):
        lam = T[s] @ (q - X0[s])
        l0 = 1.0 - lam.sum()
        worst = 0
        worst_val = l0
        for i in range(lam.shape[0]):
            if lam[i] < worst_val:
                worst_val = lam[i]
                worst = i + 1
        if worst_val >= -tol:
            return s, 0, -1
        nxt = neighbors[s, worst]
        if nxt < 0:
            return s, 1, worst
        if nxt == prev:
            # Ping-pong between two simplices across a near-flat facet: pick
            # the second most negative coordinate instead.
            vals = [l0] + lam.tolist()
            vals[worst] = math.inf
            alt = min(range(len(vals)), key=vals.__getitem__)
            if vals[alt] >= -tol:
                return s, 0, -1
            nxt = neighbors[s, alt]
            if nxt < 0:
                return s, 1, alt
        prev = s
        s = nxt
    return s, 2, -1


def locate_batch(T, X0, neighbors, starts, Q, max_steps, tol):
    """Vectorized wrapper over :func:`walk` for many queries."""
    m = Q.shape[0]
    sid = np.empty(m, dtype=np.int64)
    code = np.empty(m, dtype=np.int64)
    facet = np.empty(m, dtype=np.int64)
    for i in range(m):
        sid[i], code[i], facet[i] = walk(T, X0, neighbors, int(starts[i]), Q[i], max_steps, tol)
    return sid, code, facet
