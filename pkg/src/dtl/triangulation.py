"""Delaunay triangulation by Bowyer-Watson insertion, plus point location.

The scaffold around the first simplex is a single symbolic vertex at
infinity (``INF``): every convex-hull facet carries a "ghost" simplex made of
the facet plus ``INF``. A ghost conflicts with a new point when the point is
strictly beyond its facet; when the point lies on the facet's hyperplane the
finite neighbour's circumsphere decides, which is the lower-dimensional
Delaunay condition inside that hyperplane. Ghosts are discarded at the end.

Finished triangulations are canonical: each simplex lists its vertices in
ascending order (last two swapped when needed for positive orientation) and
simplices are sorted lexicographically. The result therefore depends only on
the point set and the index order used for tie-breaking, never on the order
of insertion.
"""
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy.spatial import cKDTree

from . import _backend
from .errors import (
    DegenerateInput,
    DimensionMismatch,
    DuplicatePoints,
    InvalidInput,
)
from .predicates import insphere_ids, insphere_sos, orient_ids

INF = -1
BOUNDARY_TOL = 1e-12
MAX_DIM = 4


@dataclass(frozen=True)
class InsideSimplex:
    simplex_id: int
    bary: np.ndarray


@dataclass(frozen=True)
class OutsideHull:
    nearest_vertex_id: int


def as_coords(points, dim=None):
    """Validate and return an (n, p) float64 C-contiguous array."""
    coords = getattr(points, "coords", points)
    P = np.ascontiguousarray(np.asarray(coords, dtype=np.float64))
    if P.ndim == 1:
        P = P.reshape(-1, 1)
    if P.ndim != 2 or P.shape[1] < 1:
        raise DimensionMismatch(f"points must be an (n, p) array, got shape {P.shape}")
    if dim is not None and P.shape[1] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {P.shape[1]}")
    if not np.all(np.isfinite(P)):
        raise InvalidInput("coordinates must be finite")
    return P


def _as_query(tri, query):
    q = np.asarray(query, dtype=np.float64)
    if q.ndim == 0:
        q = q.reshape(1)
    if q.shape[-1] != tri.dim:
        raise DimensionMismatch(f"query dimension {q.shape[-1]} != {tri.dim}")
    if not np.all(np.isfinite(q)):
        raise InvalidInput("query coordinates must be finite")
    return q


def _check_buildable(P):
    n, p = P.shape
    if p > MAX_DIM:
        raise DimensionMismatch(f"dimension {p} not supported (max {MAX_DIM})")
    if n < p + 2:
        raise InvalidInput(f"need at least p + 2 = {p + 2} points, got {n}")
    _, inverse, counts = np.unique(P, axis=0, return_inverse=True, return_counts=True)
    if np.any(counts > 1):
        dup = np.flatnonzero(counts[inverse.reshape(-1)] > 1)
        raise DuplicatePoints(f"duplicate points at indices {dup[:10].tolist()}")


def _zorder(P):
    """Insertion order along a Morton curve; ties keep index order."""
    n, p = P.shape
    bits = min(16, 62 // p)
    lo = P.min(axis=0)
    span = P.max(axis=0) - lo
    span[span == 0] = 1.0
    q = np.floor((P - lo) / span * (2 ** bits - 1)).astype(np.uint64)
    code = np.zeros(n, dtype=np.uint64)
    for b in range(bits):
        for d in range(p):
            code |= ((q[:, d] >> np.uint64(b)) & np.uint64(1)) << np.uint64(b * p + d)
    return np.argsort(code, kind="stable")


def _rank_exact(vectors):
    rows = [[Fraction(float(v)) for v in vec] for vec in vectors]
    rank = 0
    ncol = len(rows[0]) if rows else 0
    for c in range(ncol):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(rank + 1, len(rows)):
            f = rows[r][c] / rows[rank][c]
            if f:
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def _initial_simplex(P, order):
    p = P.shape[1]
    chosen = [int(order[0])]
    for idx in order[1:]:
        idx = int(idx)
        vecs = [P[c] - P[chosen[0]] for c in chosen[1:]] + [P[idx] - P[chosen[0]]]
        if _rank_exact(vecs) == len(vecs):
            chosen.append(idx)
            if len(chosen) == p + 1:
                return chosen
    raise DegenerateInput("points do not span a full-dimensional affine hull")


class _Incremental:
    """Mutable mesh with ghost simplices used while inserting points."""

    def __init__(self, P, first, delaunay=True):
        self.P = P
        self.p = P.shape[1]
        self.delaunay = delaunay
        self.simp = []
        self.nbr = []
        self.alive = []
        first = list(first)
        if orient_ids(P, first) < 0:
            first[-1], first[-2] = first[-2], first[-1]
        self._new(first)
        for i in range(self.p + 1):
            g = list(first)
            g[i] = INF
            # ghosts must be positive when INF is replaced by an outside point
            j = (i + 1) % (self.p + 1)
            g[i], g[j] = g[j], g[i]
            self._new(g)
        self._link_all()
        self.last = 0

    def _new(self, verts):
        self.simp.append(verts)
        self.nbr.append([-2] * (self.p + 1))
        self.alive.append(True)
        return len(self.simp) - 1

    def _link_all(self):
        seen = {}
        for s, verts in enumerate(self.simp):
            if not self.alive[s]:
                continue
            for i in range(self.p + 1):
                key = tuple(sorted(verts[:i] + verts[i + 1:]))
                if key in seen:
                    t, j = seen.pop(key)
                    self.nbr[s][i] = t
                    self.nbr[t][j] = s
                else:
                    seen[key] = (s, i)

    def _orient_with(self, s, i, q):
        ids = list(self.simp[s])
        ids[i] = q
        return orient_ids(self.P, ids)

    def _is_ghost(self, s):
        return INF in self.simp[s]

    def _conflict(self, s, q):
        verts = self.simp[s]
        if INF not in verts:
            if not self.delaunay:
                return False
            return insphere_sos(self.P, verts, q) > 0
        k = verts.index(INF)
        o = self._orient_with(s, k, q)
        if o:
            return o > 0
        if not self.delaunay:
            raise _Degenerate
        return insphere_sos(self.P, self.simp[self.nbr[s][k]], q) > 0

    def locate(self, q):
        s = self.last
        p1 = self.p + 1
        limit = 4 * len(self.simp) + 16
        for step in range(limit):
            moved = False
            for t in range(p1):
                i = (t + step) % p1
                if self._orient_with(s, i, q) < 0:
                    s = self.nbr[s][i]
                    moved = True
                    break
            if not moved:
                return s
            if self._is_ghost(s):
                return s
        return self._locate_exhaustive(q)

    def _locate_exhaustive(self, q):
        ghosts = []
        for s, verts in enumerate(self.simp):
            if not self.alive[s]:
                continue
            if INF in verts:
                ghosts.append(s)
                continue
            if all(self._orient_with(s, i, q) >= 0 for i in range(self.p + 1)):
                return s
        for s in ghosts:
            if self._orient_with(s, self.simp[s].index(INF), q) > 0:
                return s
        raise RuntimeError("point location failed")

    def insert(self, q):
        start = self.locate(q)
        if not self.delaunay:
            try:
                self._insert_from(start, q)
                return
            except _Degenerate:
                self.delaunay = True
                try:
                    self._insert_from(start, q)
                finally:
                    self.delaunay = False
                return
        self._insert_from(start, q)

    def _insert_from(self, start, q):
        p1 = self.p + 1
        if not self.delaunay and not self._is_ghost(start):
            # splitting a simplex is only valid strictly inside it
            if any(self._orient_with(start, i, q) == 0 for i in range(p1)):
                raise _Degenerate
        cavity = {start}
        outside = set()
        stack = [start]
        boundary = []
        while stack:
            s = stack.pop()
            for i in range(p1):
                nb = self.nbr[s][i]
                if nb in cavity:
                    continue
                if nb in outside:
                    boundary.append((s, i))
                elif self._conflict(nb, q):
                    cavity.add(nb)
                    stack.append(nb)
                else:
                    outside.add(nb)
                    boundary.append((s, i))
        boundary.sort()
        facet_map = {}
        created = []
        for s, i in boundary:
            verts = list(self.simp[s])
            verts[i] = q
            ns = self._new(verts)
            created.append(ns)
            outer = self.nbr[s][i]
            self.nbr[ns][i] = outer
            onb = self.nbr[outer]
            onb[onb.index(s)] = ns
            for j in range(p1):
                if j == i:
                    continue
                key = tuple(sorted(verts[:j] + verts[j + 1:]))
                hit = facet_map.pop(key, None)
                if hit is None:
                    facet_map[key] = (ns, j)
                else:
                    t, tj = hit
                    self.nbr[ns][j] = t
                    self.nbr[t][tj] = ns
        if facet_map:
            raise RuntimeError("cavity retriangulation left unmatched facets")
        for s in cavity:
            self.alive[s] = False
        for ns in created:
            if INF not in self.simp[ns]:
                self.last = ns
                break

    def finite_simplices(self):
        return [v for s, v in enumerate(self.simp) if self.alive[s] and INF not in v]


class _Degenerate(Exception):
    pass


class Triangulation:
    """A finished simplicial mesh over ``points``; treat as immutable.

    Attributes
    ----------
    points : (n, p) array
    simplices : (m, p + 1) int64 array, positively oriented
    neighbors : (m, p + 1) int64 array; ``neighbors[s, i]`` shares the facet
        opposite vertex ``i`` of ``s``, -1 on the convex hull
    hull_facets : list of (simplex_id, facet_index)
    vertex_to_incident : list of int64 arrays, sorted simplex ids per vertex
    """

    def __init__(self, points, simplices, neighbors, hull_facets, vertex_to_incident):
        self.points = points
        self.simplices = simplices
        self.neighbors = neighbors
        self.hull_facets = hull_facets
        self.vertex_to_incident = vertex_to_incident

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def n_points(self):
        return self.points.shape[0]

    def __len__(self):
        return self.simplices.shape[0]

    @classmethod
    def from_simplices(cls, points, simplices, canonical=True):
        """Assemble adjacency for a given list of simplices.

        With ``canonical`` the vertex order and simplex order are normalized
        (see module docstring); otherwise the given order is kept and only
        orientation is checked.
        """
        P = as_coords(points)
        n, p = P.shape
        S = np.asarray(simplices, dtype=np.int64).reshape(-1, p + 1)
        if S.size and (S.min() < 0 or S.max() >= n):
            raise InvalidInput("simplex vertex index out of range")
        S = S.copy()
        if canonical:
            S.sort(axis=1)
        for s in range(S.shape[0]):
            o = orient_ids(P, S[s].tolist())
            if o == 0:
                raise InvalidInput(f"simplex {s} is degenerate")
            if o < 0:
                if not canonical:
                    raise InvalidInput(f"simplex {s} is negatively oriented")
                S[s, [-2, -1]] = S[s, [-1, -2]]
        if canonical and S.shape[0]:
            key = np.sort(S, axis=1)
            S = S[np.lexsort(key.T[::-1])]
        nb = _neighbors(S, p)
        hull = [(int(s), int(i)) for s, i in zip(*np.nonzero(nb < 0))]
        flat = S.reshape(-1)
        order = np.argsort(flat, kind="stable")
        counts = np.bincount(flat, minlength=n)
        owners = order // (p + 1)
        incident = np.split(owners, np.cumsum(counts)[:-1])
        incident = [np.asarray(a, dtype=np.int64) for a in incident]
        return cls(P, np.ascontiguousarray(S), nb, hull, incident)

    @cached_property
    def anchors(self):
        return np.ascontiguousarray(self.points[self.simplices[:, 0]])

    @cached_property
    def transforms(self):
        """Per-simplex inverse edge matrices: ``bary[1:] = T @ (x - anchor)``."""
        X = self.points[self.simplices]
        A = np.transpose(X[:, 1:, :] - X[:, :1, :], (0, 2, 1))
        return np.ascontiguousarray(np.linalg.inv(A))

    @cached_property
    def bary_gradients(self):
        """(m, p + 1, p): gradient of each barycentric coordinate per simplex."""
        T = self.transforms
        return np.concatenate([-T.sum(axis=1, keepdims=True), T], axis=1)

    @cached_property
    def kdtree(self):
        return cKDTree(self.points)

    @cached_property
    def start_simplex(self):
        return np.array([a[0] if len(a) else 0 for a in self.vertex_to_incident], dtype=np.int64)

    def barycentric(self, simplex_ids, Q):
        sid = np.asarray(simplex_ids, dtype=np.int64)
        mu = np.einsum("mij,mj->mi", self.transforms[sid], Q - self.anchors[sid])
        return np.concatenate([1.0 - mu.sum(axis=1, keepdims=True), mu], axis=1)

    def edges(self):
        p = self.dim
        pairs = np.array(list(combinations(range(p + 1), 2)))
        e = np.sort(self.simplices[:, pairs].reshape(-1, 2), axis=1)
        return np.unique(e, axis=0)


def _neighbors(S, p):
    m = S.shape[0]
    nb = np.full((m, p + 1), -1, dtype=np.int64)
    if m == 0:
        return nb
    keys = []
    for i in range(p + 1):
        f = np.delete(S, i, axis=1)
        keys.append(np.sort(f, axis=1))
    F = np.concatenate(keys, axis=0)
    owner = np.tile(np.arange(m), p + 1)
    local = np.repeat(np.arange(p + 1), m)
    order = np.lexsort(F.T[::-1])
    Fs = F[order]
    same = np.all(Fs[1:] == Fs[:-1], axis=1)
    if np.any(same[1:] & same[:-1]):
        raise InvalidInput("a facet is shared by more than two simplices")
    k = np.flatnonzero(same)
    a, b = order[k], order[k + 1]
    nb[owner[a], local[a]] = owner[b]
    nb[owner[b], local[b]] = owner[a]
    return nb


def build_delaunay(points):
    """Delaunay triangulation of ``points`` by Bowyer-Watson insertion.

    Raises DuplicatePoints, DegenerateInput or DimensionMismatch on bad input.
    Cospherical ties are broken by point index (lower index lifted first).
    """
    P = as_coords(points)
    _check_buildable(P)
    order = _zorder(P)
    first = _initial_simplex(P, order)
    mesh = _Incremental(P, first)
    placed = set(first)
    for idx in order:
        idx = int(idx)
        if idx not in placed:
            mesh.insert(idx)
    return Triangulation.from_simplices(P, mesh.finite_simplices())


def random_triangulation(points, seed, flips=None, method="flip"):
    """A valid but generally non-Delaunay triangulation of ``points``.

    ``method="flip"`` (p = 2 only) applies ``flips`` random edge flips to the
    Delaunay mesh; ``flips=None`` means n flips. Any other dimension, or
    ``method="insertion"``, inserts points in random order without Delaunay
    repair. In 1-D every triangulation equals the Delaunay one.
    """
    P = as_coords(points)
    _check_buildable(P)
    rng = np.random.default_rng(seed)
    p = P.shape[1]
    if p == 1:
        return build_delaunay(P)
    if method == "flip" and p == 2:
        tri = build_delaunay(P)
        k = P.shape[0] if flips is None else int(flips)
        return _random_flips(tri, k, rng)
    if method not in ("flip", "insertion"):
        raise InvalidInput(f"unknown method {method!r}")
    order = rng.permutation(P.shape[0])
    first = _initial_simplex(P, order)
    mesh = _Incremental(P, first, delaunay=False)
    placed = set(first)
    for idx in order:
        idx = int(idx)
        if idx not in placed:
            mesh.insert(idx)
    return Triangulation.from_simplices(P, mesh.finite_simplices())


def _random_flips(tri, k, rng):
    if k <= 0:
        return tri
    P = tri.points
    tris = [list(map(int, t)) for t in tri.simplices]
    edge_map = {}
    for t, verts in enumerate(tris):
        for a, b in combinations(verts, 2):
            edge_map.setdefault((min(a, b), max(a, b)), set()).add(t)
    done = 0
    attempts = 0
    budget = 50 * k + 1000
    while done < k and attempts < budget:
        attempts += 1
        t = int(rng.integers(len(tris)))
        e = int(rng.integers(3))
        verts = tris[t]
        b, c = verts[(e + 1) % 3], verts[(e + 2) % 3]
        a = verts[e]
        key = (min(b, c), max(b, c))
        owners = edge_map[key]
        if len(owners) != 2:
            continue
        u = next(x for x in owners if x != t)
        d = next(x for x in tris[u] if x not in (b, c))
        # flippable iff segment a-d crosses b-c strictly
        if orient_ids(P, [a, d, b]) * orient_ids(P, [a, d, c]) >= 0:
            continue
        new_t = [a, b, d]
        new_u = [a, d, c]
        for old in (t, u):
            for x, y in combinations(tris[old], 2):
                edge_map[(min(x, y), max(x, y))].discard(old)
        del edge_map[key]
        tris[t] = new_t
        tris[u] = new_u
        for idx in (t, u):
            for x, y in combinations(tris[idx], 2):
                edge_map.setdefault((min(x, y), max(x, y)), set()).add(idx)
        done += 1
    return Triangulation.from_simplices(P, tris)


def _nearest(tri, Q):
    """Nearest training point per query, ties to the lowest index."""
    n = tri.n_points
    k = min(n, 4)
    dist, idx = tri.kdtree.query(Q, k=k)
    dist = dist.reshape(len(Q), k)
    idx = idx.reshape(len(Q), k)
    out = idx[:, 0].copy()
    tied = dist[:, 1] == dist[:, 0] if k > 1 else np.zeros(len(Q), bool)
    for r in np.flatnonzero(tied):
        d0 = np.sum((tri.points - Q[r]) ** 2, axis=1)
        out[r] = int(np.flatnonzero(d0 == d0.min())[0])
    return out


def _facet_outside(tri, s, i, q):
    """Exact: is ``q`` strictly beyond hull facet ``i`` of simplex ``s``?"""
    verts = tri.simplices[s]
    M = np.ascontiguousarray(np.vstack([tri.points[verts], q]))
    ids = list(range(tri.dim + 1))
    ids[i] = tri.dim + 1
    return orient_ids(M, ids) < 0


def hull_contains(tri, query):
    """True iff ``query`` lies inside or on the convex hull (exact)."""
    q = _as_query(tri, query).reshape(-1)
    return _hull_contains(tri, q)


def _hull_contains(tri, q):
    if not tri.hull_facets:
        return False
    s_arr = np.array([s for s, _ in tri.hull_facets])
    i_arr = np.array([i for _, i in tri.hull_facets])
    V = tri.points[tri.simplices[s_arr]]
    V[np.arange(len(s_arr)), i_arr] = q
    E = V[:, 1:, :] - V[:, :1, :]
    det = np.linalg.det(E) if tri.dim > 1 else E[:, 0, 0]
    scale = np.prod(np.linalg.norm(E, axis=2), axis=1)
    sure_out = det < -1e-10 * scale
    if np.any(sure_out):
        return False
    unsure = np.flatnonzero(det <= 1e-10 * scale)
    for k in unsure:
        if _facet_outside(tri, int(s_arr[k]), int(i_arr[k]), q):
            return False
    return True


def _containing(tri, sid, q, tol):
    lam = tri.barycentric([sid], q[None, :])[0]
    return lam.min() >= -tol, lam


def _resolve_boundary(tri, sid, lam, q, tol):
    """Lowest-id simplex containing ``q`` when it lies on a shared face."""
    face = tri.simplices[sid][lam > tol]
    cand = tri.vertex_to_incident[face[0]]
    for v in face[1:]:
        cand = np.intersect1d(cand, tri.vertex_to_incident[v], assume_unique=True)
    if len(cand) == 0:
        return sid, lam
    lams = tri.barycentric(cand, np.broadcast_to(q, (len(cand), tri.dim)))
    ok = np.flatnonzero(lams.min(axis=1) >= -tol)
    if len(ok) == 0:
        return sid, lam
    j = ok[0]
    return int(cand[j]), lams[j]


def _exhaustive(tri, q, tol):
    lam = tri.barycentric(np.arange(len(tri)), np.broadcast_to(q, (len(tri), tri.dim)))
    worst = lam.min(axis=1)
    j = int(np.argmax(worst))
    if worst[j] >= -tol:
        ok = np.flatnonzero(worst >= -tol)
        j = int(ok[0])
    return j, lam[j]


def locate_many(tri, queries, tol=BOUNDARY_TOL):
    """Vectorized point location.

    Returns ``(simplex_ids, bary, nearest)``: ``simplex_ids[k] == -1`` marks
    an out-of-hull query, for which ``nearest[k]`` is the closest training
    point. ``bary`` rows are clamped at zero and renormalized.
    """
    Q = np.ascontiguousarray(_as_query(tri, queries).reshape(-1, tri.dim))
    nq = Q.shape[0]
    nearest = _nearest(tri, Q)
    starts = np.ascontiguousarray(tri.start_simplex[nearest])
    max_steps = 4 * int(np.sqrt(len(tri))) + 64
    sid, code, facet = _backend.kernels.locate_batch(
        tri.transforms, tri.anchors, tri.neighbors, starts, Q, max_steps, tol)
    sid = np.asarray(sid, dtype=np.int64).copy()
    bary = np.zeros((nq, tri.dim + 1))
    found = code == 0
    if np.any(found):
        bary[found] = tri.barycentric(sid[found], Q[found])
    for k in range(nq):
        q = Q[k]
        if code[k] == 1:
            if _facet_outside(tri, int(sid[k]), int(facet[k]), q) or not _hull_contains(tri, q):
                sid[k] = -1
                continue
            sid[k], bary[k] = _exhaustive(tri, q, tol)
        elif code[k] == 2:
            if not _hull_contains(tri, q):
                sid[k] = -1
                continue
            sid[k], bary[k] = _exhaustive(tri, q, tol)
        lam = bary[k]
        if lam.min() <= tol:
            s = int(sid[k])
            # slightly negative against a hull facet: the exact test decides
            for i in np.flatnonzero(lam < 0):
                if tri.neighbors[s, i] < 0 and _facet_outside(tri, s, int(i), q):
                    sid[k] = -1
                    break
            if sid[k] < 0:
                continue
            sid[k], lam = _resolve_boundary(tri, s, lam, q, tol)
            lam = np.clip(lam, 0.0, None)
            bary[k] = lam / lam.sum()
    # a query equal to a vertex gets exact one-hot weights
    hit = np.flatnonzero((sid >= 0) & np.all(Q == tri.points[nearest], axis=1))
    for k in hit:
        mask = tri.simplices[sid[k]] == nearest[k]
        if mask.any():
            bary[k] = mask.astype(np.float64)
    return sid, bary, nearest


def locate(tri, query):
    """InsideSimplex for hull queries, else OutsideHull with the nearest point."""
    sid, bary, nearest = locate_many(tri, _as_query(tri, query).reshape(1, -1))
    if sid[0] < 0:
        return OutsideHull(int(nearest[0]))
    return InsideSimplex(int(sid[0]), bary[0])


def _mean_edge_lengths(tri, sid):
    X = tri.points[tri.simplices[sid]]
    p = tri.dim
    pairs = list(combinations(range(p + 1), 2))
    a = np.array([i for i, _ in pairs])
    b = np.array([j for _, j in pairs])
    return np.linalg.norm(X[:, a, :] - X[:, b, :], axis=2).mean(axis=1)


def covering_edge_average_many(tri, queries):
    Q = _as_query(tri, queries).reshape(-1, tri.dim)
    sid, _, nearest = locate_many(tri, Q)
    out = np.empty(len(Q))
    inside = sid >= 0
    if np.any(inside):
        out[inside] = _mean_edge_lengths(tri, sid[inside])
    if np.any(~inside):
        out[~inside] = np.linalg.norm(Q[~inside] - tri.points[nearest[~inside]], axis=1)
    return out


def covering_edge_average(tri, query):
    """Mean edge length of the covering simplex; nearest-point distance outside."""
    return float(covering_edge_average_many(tri, _as_query(tri, query).reshape(1, -1))[0])


# ----------------------------------------------------------------------------
# validity checks

def simplex_volumes(tri):
    X = tri.points[tri.simplices]
    E = X[:, 1:, :] - X[:, :1, :]
    p = tri.dim
    det = np.linalg.det(E) if p > 1 else E[:, 0, 0]
    return np.abs(det) / float(np.prod(np.arange(1, p + 1)))


def hull_volume_from_facets(tri):
    """Hull volume as a sum of cones from the centroid over hull facets."""
    c = tri.points.mean(axis=0)
    p = tri.dim
    total = 0.0
    for s, i in tri.hull_facets:
        V = np.delete(tri.points[tri.simplices[s]], i, axis=0)
        E = V - c
        total += abs(np.linalg.det(E)) if p > 1 else abs(E[0, 0])
    return total / float(np.prod(np.arange(1, p + 1)))


def empty_sphere_violations(tri):
    """(simplex, vertex) pairs with a vertex strictly inside a circumsphere.

    Candidates come from a float circumball search with a generous margin;
    each candidate is then decided by the exact predicate.
    """
    P = tri.points
    X = P[tri.simplices]
    A = 2.0 * (X[:, 1:, :] - X[:, :1, :])
    rhs = np.sum(X[:, 1:, :] ** 2, axis=2) - np.sum(X[:, :1, :] ** 2, axis=2)
    centers = np.linalg.solve(A, rhs[..., None])[..., 0]
    radii = np.linalg.norm(X[:, 0, :] - centers, axis=1)
    hits = tri.kdtree.query_ball_point(centers, radii * (1 + 1e-6) + 1e-12)
    bad = []
    for s, cand in enumerate(hits):
        verts = set(tri.simplices[s].tolist())
        ids = tri.simplices[s].tolist()
        for v in cand:
            if v in verts:
                continue
            if insphere_ids(P, ids, v) > 0:
                bad.append((s, v))
    return bad


def check_valid(tri):
    """Raise AssertionError unless ``tri`` is a proper triangulation of its hull."""
    P = tri.points
    n, p = P.shape
    S, nb = tri.simplices, tri.neighbors
    for s in range(len(tri)):
        assert orient_ids(P, S[s].tolist()) > 0, f"simplex {s} not positive"
    for s in range(len(tri)):
        for i in range(p + 1):
            t = nb[s, i]
            if t < 0:
                continue
            assert s in nb[t], "neighbor relation not symmetric"
            j = int(np.flatnonzero(nb[t] == s)[0])
            ids = S[s].tolist()
            ids[i] = int(S[t, j])
            assert orient_ids(P, ids) < 0, "adjacent simplices overlap"
    assert all(len(a) > 0 for a in tri.vertex_to_incident), "point missing from mesh"
    for s, i in tri.hull_facets:
        for v in range(n):
            if v in S[s]:
                continue
            ids = S[s].tolist()
            ids[i] = v
            assert orient_ids(P, ids) >= 0, "boundary facet is not a hull facet"
    vol = simplex_volumes(tri).sum()
    hull = hull_volume_from_facets(tri)
    assert abs(vol - hull) <= 1e-9 * hull, f"volume {vol} != hull volume {hull}"
    return True
