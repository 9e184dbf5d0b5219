from fractions import Fraction

import numpy as np
import pytest

from dtl import _backend


@pytest.fixture(params=_backend.available())
def backend(request):
    with _backend.use_backend(request.param):
        yield request.param


def frac_det(rows):
    """Determinant by Fraction Gaussian elimination (independent oracle)."""
    a = [[Fraction(v) for v in r] for r in rows]
    n = len(a)
    det = Fraction(1)
    for i in range(n):
        piv = next((r for r in range(i, n) if a[r][i] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != i:
            a[i], a[piv] = a[piv], a[i]
            det = -det
        det *= a[i][i]
        for r in range(i + 1, n):
            f = a[r][i] / a[i][i]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[i])]
    return det


def sign(x):
    return (x > 0) - (x < 0)


def uniform_points(n, p, seed):
    return np.random.default_rng(seed).random((n, p))


def dense_empty_sphere_violations(tri, band=1e-6):
    """Every simplex against every vertex.

    Float distances settle clear cases; anything within a relative ``band``
    of the sphere is decided with the public exact predicate.
    """
    from dtl.predicates import Sign, in_circumsphere

    P = tri.points
    X = P[tri.simplices]
    A = 2.0 * (X[:, 1:, :] - X[:, :1, :])
    rhs = np.sum(X[:, 1:, :] ** 2, axis=2) - np.sum(X[:, :1, :] ** 2, axis=2)
    c = np.linalg.solve(A, rhs[..., None])[..., 0]
    r2 = np.sum((X[:, 0, :] - c) ** 2, axis=1)
    bad = []
    for lo in range(0, len(c), 512):
        cc, rr = c[lo:lo + 512], r2[lo:lo + 512]
        d2 = np.sum((P[None, :, :] - cc[:, None, :]) ** 2, axis=2)
        clear_in = d2 < rr[:, None] * (1 - band)
        near = np.abs(d2 - rr[:, None]) <= band * rr[:, None]
        for s, v in zip(*np.nonzero(clear_in | near)):
            s = lo + int(s)
            if v in tri.simplices[s]:
                continue
            if in_circumsphere(P[tri.simplices[s]], P[v]) == Sign.POSITIVE:
                bad.append((s, int(v)))
    return bad


def hull_volume_oracle(P):
    if P.shape[1] == 1:
        return float(P.max() - P.min())
    from scipy.spatial import ConvexHull
    return float(ConvexHull(P).volume)


# -- acceptance reporting ----------------------------------------------------------

ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        detail = dict(report.user_properties).get("detail", "")
        ACCEPTANCE[name] = ("PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, (status, detail) in sorted(ACCEPTANCE.items()):
        terminalreporter.write_line(f"{status}  {name}  {detail}")
