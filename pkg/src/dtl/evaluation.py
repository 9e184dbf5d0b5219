"""Monte-Carlo checks of the estimator's geometric and statistical properties.

Every experiment takes an integer ``seed`` and derives all randomness from
it: the base draw uses ``default_rng(seed)``, replicate ``k`` (alternative
triangulation, sample size) uses ``seed + 1 + k``. Results are plain
dataclasses with ``to_dict()`` (JSON) and ``rows()`` (one CSV row per
condition).
"""
from dataclasses import asdict, dataclass, field

import numpy as np

from .datasets import classification_model, regression_model
from .errors import InvalidInput
from .interpolation import evaluate_gradient_many, evaluate_many
from .optimizer import FitConfig, LossKind, classify, fit
from .triangulation import (
    as_coords, build_delaunay, covering_edge_average_many, locate_many,
    random_triangulation,
)


def geometric_loss_many(tri, queries):
    """``sum_i lambda_i |x_i - q|^2`` over the covering simplex; 0 outside."""
    Q = np.asarray(queries, dtype=np.float64).reshape(-1, tri.dim)
    sid, bary, _ = locate_many(tri, Q)
    out = np.zeros(len(Q))
    inside = sid >= 0
    if np.any(inside):
        V = tri.points[tri.simplices[sid[inside]]]          # (k, p+1, p)
        d2 = np.sum((V - Q[inside][:, None, :]) ** 2, axis=2)
        out[inside] = np.einsum("kj,kj->k", bary[inside], d2)
    return out


def geometric_loss(points, tri, query):
    P = as_coords(points)
    if P.shape != tri.points.shape or not np.array_equal(P, tri.points):
        raise InvalidInput("points do not match the triangulation")
    return float(geometric_loss_many(tri, np.asarray(query, dtype=np.float64))[0])


def _seed(seed, k):
    return int(seed) + 1 + int(k)


def _check_sizes(sizes):
    sizes = [int(n) for n in sizes]
    if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise InvalidInput("sample sizes must be non-empty and strictly increasing")
    return sizes


class _Report:
    def to_dict(self):
        return _plain(asdict(self))


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


# -- optimality ---------------------------------------------------------------

@dataclass
class OptimalityReport(_Report):
    n: int
    p: int
    num_queries: int
    num_alternatives: int
    in_hull_queries: int
    mean_loss_delaunay: float
    mean_loss_alternative: float
    alternative_means: list
    pointwise_violations: int
    comparisons: int
    max_excess: float
    tolerance: float = 1e-12

    def rows(self):
        return [{"alternative": k, "mean_loss_delaunay": self.mean_loss_delaunay,
                 "mean_loss_alternative": m} for k, m in enumerate(self.alternative_means)]


def optimality_experiment(n, p, num_queries, num_alt_triangulations, seed=0,
                          flips=None, tol=1e-12):
    """Compare the geometric loss of Delaunay against random triangulations.

    Points and queries are uniform on [0, 1]^p. The comparison is made both
    in mean and for every (query, alternative) pair; ``max_excess`` is the
    largest ``H_delaunay - H_alternative`` seen (<= 0 when the claim holds).
    """
    rng = np.random.default_rng(seed)
    X = rng.random((n, p))
    Q = rng.random((num_queries, p))
    tri = build_delaunay(X)
    h_d = geometric_loss_many(tri, Q)
    in_hull = int(np.count_nonzero(locate_many(tri, Q)[0] >= 0))
    alt_means, violations, excess = [], 0, -np.inf
    for k in range(num_alt_triangulations):
        alt = random_triangulation(X, seed=_seed(seed, k), flips=flips)
        h_a = geometric_loss_many(alt, Q)
        diff = h_d - h_a
        violations += int(np.count_nonzero(diff > tol))
        excess = max(excess, float(diff.max()))
        alt_means.append(float(h_a.mean()))
    return OptimalityReport(
        n=n, p=p, num_queries=num_queries, num_alternatives=num_alt_triangulations,
        in_hull_queries=in_hull, mean_loss_delaunay=float(h_d.mean()),
        mean_loss_alternative=float(np.mean(alt_means)) if alt_means else float(h_d.mean()),
        alternative_means=alt_means, pointwise_violations=violations,
        comparisons=num_queries * num_alt_triangulations,
        max_excess=excess if num_alt_triangulations else 0.0, tolerance=tol)


# -- scaling ------------------------------------------------------------------

@dataclass
class ScalingReport(_Report):
    p: int
    sample_sizes: list
    mean_T: list
    fitted_slope: float
    expected_slope: float
    in_hull_queries: list = field(default_factory=list)

    def rows(self):
        return [{"n": n, "mean_T": t, "in_hull_queries": h}
                for n, t, h in zip(self.sample_sizes, self.mean_T, self.in_hull_queries)]


def log_log_slope(x, y):
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def scaling_experiment(p, sample_sizes, queries_per_n, seed=0):
    """Mean covering-simplex edge length at in-hull queries, per n.

    Uniform density on [0, 1]^p; the slope of log mean_T on log n should
    approach -1/p.
    """
    sizes = _check_sizes(sample_sizes)
    means, counts = [], []
    for k, n in enumerate(sizes):
        rng = np.random.default_rng(_seed(seed, k))
        X = rng.random((n, p))
        Q = rng.random((queries_per_n, p))
        tri = build_delaunay(X)
        T = covering_edge_average_many(tri, Q)
        sid = locate_many(tri, Q)[0]
        inside = T[sid >= 0]
        if len(inside) == 0:
            raise InvalidInput(f"no query fell inside the hull at n={n}")
        means.append(float(inside.mean()))
        counts.append(int(len(inside)))
    return ScalingReport(p=p, sample_sizes=sizes, mean_T=means,
                         fitted_slope=log_log_slope(sizes, means),
                         expected_slope=-1.0 / p, in_hull_queries=counts)


# -- regression consistency / interpolation error -----------------------------

@dataclass
class ErrorCurve(_Report):
    generator: str
    metric: str
    sample_sizes: list
    errors: list
    in_hull_queries: list
    lam: float = 0.0
    loss: str = "squared"
    noise: float = 0.0

    def rows(self):
        return [{"n": n, self.metric: e, "in_hull_queries": h}
                for n, e, h in zip(self.sample_sizes, self.errors, self.in_hull_queries)]

    @property
    def ratios(self):
        e = self.errors
        return [a / b if b > 0 else float("inf") for a, b in zip(e, e[1:])]


def _fit_config(lam, loss, max_iters, seed):
    return FitConfig(lam=float(lam), loss=LossKind(loss), max_iters=max_iters, seed=seed)


def consistency_experiment(generator, loss="squared", lam=0.0, sample_sizes=(50, 200, 800),
                           seed=0, noise=0.0, n_test=2000, max_iters=1000):
    """Held-out MSE against the true regression function, per n.

    Test points are uniform on [0, 1]^2; only those inside the training
    hull are scored (outside it the estimate is a nearest-point constant).
    """
    gen = regression_model(generator) if isinstance(generator, str) else generator
    sizes = _check_sizes(sample_sizes)
    test_rng = np.random.default_rng(seed)
    Xt = test_rng.random((n_test, gen.dim))
    ft = gen.fn(Xt)
    errs, counts = [], []
    for k, n in enumerate(sizes):
        rng = np.random.default_rng(_seed(seed, k))
        X, y = gen.sample(n, noise, rng)
        model, _ = fit(X, y, _fit_config(lam, loss, max_iters, _seed(seed, k)))
        sid = locate_many(model.tri, Xt)[0]
        inside = sid >= 0
        pred = evaluate_many(model.tri, model.psi, Xt[inside])
        errs.append(float(np.mean((pred - ft[inside]) ** 2)))
        counts.append(int(np.count_nonzero(inside)))
    return ErrorCurve(generator=gen.name, metric="mse", sample_sizes=sizes, errors=errs,
                      in_hull_queries=counts, lam=float(lam), loss=LossKind(loss).value,
                      noise=float(noise))


def interpolation_error_experiment(generator, sample_sizes=(100, 400, 1600), seed=0,
                                   n_test=4000, margin=0.1):
    """RMS error of the lambda = 0 interpolant of noiseless data.

    Scored on in-hull test points in ``[margin, 1 - margin]^2``. With
    ``margin=0`` this is the whole hull, where thin boundary simplices
    dominate the error and make the rate noisy at these sample sizes.
    """
    gen = regression_model(generator) if isinstance(generator, str) else generator
    sizes = _check_sizes(sample_sizes)
    Xt = np.random.default_rng(seed).uniform(margin, 1.0 - margin, (n_test, gen.dim))
    ft = gen.fn(Xt)
    errs, counts = [], []
    for k, n in enumerate(sizes):
        rng = np.random.default_rng(_seed(seed, k))
        X, y = gen.sample(n, 0.0, rng)
        tri = build_delaunay(X)
        inside = locate_many(tri, Xt)[0] >= 0
        pred = evaluate_many(tri, y, Xt[inside])
        errs.append(float(np.sqrt(np.mean((pred - ft[inside]) ** 2))))
        counts.append(int(np.count_nonzero(inside)))
    return ErrorCurve(generator=gen.name, metric="l2_error", sample_sizes=sizes, errors=errs,
                      in_hull_queries=counts)


# -- local adaptivity ---------------------------------------------------------

def local_adaptivity_experiment(generator, sample_sizes=(100, 400, 1600), seed=0,
                                n_test=2000, margin=0.1):
    """Mean gradient error of the lambda = 0 interpolant at interior points.

    Test points are uniform on ``[margin, 1 - margin]^2`` which keeps them
    away from the hull boundary, where simplices are long and thin.
    """
    gen = regression_model(generator) if isinstance(generator, str) else generator
    sizes = _check_sizes(sample_sizes)
    Xt = np.random.default_rng(seed).uniform(margin, 1.0 - margin, (n_test, gen.dim))
    gt = gen.grad(Xt)
    errs, counts = [], []
    for k, n in enumerate(sizes):
        rng = np.random.default_rng(_seed(seed, k))
        X, y = gen.sample(n, 0.0, rng)
        tri = build_delaunay(X)
        g, _ = evaluate_gradient_many(tri, y, Xt)
        ok = ~np.isnan(g[:, 0])
        errs.append(float(np.mean(np.linalg.norm(g[ok] - gt[ok], axis=1))))
        counts.append(int(np.count_nonzero(ok)))
    return ErrorCurve(generator=gen.name, metric="gradient_error", sample_sizes=sizes,
                      errors=errs, in_hull_queries=counts)


# -- classification -----------------------------------------------------------

@dataclass
class RiskReport(_Report):
    generator: str
    n: int
    n_test: int
    bayes_risk: float
    empirical_dtl_risk: float
    bound: float
    lam: float = 0.0
    loss: str = "squared"
    flip: float = 0.0

    def rows(self):
        return [{"n": self.n, "n_test": self.n_test, "bayes_risk": self.bayes_risk,
                 "empirical_dtl_risk": self.empirical_dtl_risk, "bound": self.bound}]


def classification_risk_experiment(generator, n, n_test, lam=0.0, seed=0, loss="squared",
                                   flip=0.0, max_iters=1000):
    """Test misclassification rate of ``1{F > 1/2}`` next to ``2 R_B (1 - R_B)``.

    ``generator`` is a ClassificationModel or a name (``"flip-circles"``
    uses ``flip`` as its label-flip rate). Test labels are drawn from the
    same generator, so the empirical risk estimates the true risk.
    """
    gen = classification_model(generator, flip=flip) if isinstance(generator, str) else generator
    rb = gen.bayes_risk
    if rb is None:
        raise InvalidInput("generator has no analytic Bayes risk")
    rng = np.random.default_rng(seed)
    X, y = gen.sample(n, rng)
    Xt, yt = gen.sample(n_test, np.random.default_rng(_seed(seed, 0)))
    model, _ = fit(X, y, _fit_config(lam, loss, max_iters, seed))
    pred = classify(model, Xt)
    risk = float(np.mean(pred != yt))
    name = "flip-circles" if gen.name == "circles" and gen.flip > 0 else gen.name
    return RiskReport(generator=name, n=n, n_test=n_test, bayes_risk=float(rb),
                      empirical_dtl_risk=risk, bound=2.0 * rb * (1.0 - rb), lam=float(lam),
                      loss=LossKind(loss).value, flip=float(gen.flip))
