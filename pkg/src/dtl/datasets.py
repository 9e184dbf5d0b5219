"""Synthetic data generators.

Regression generators draw features uniformly on the unit square and know
their true function and gradient. Classification generators know their
conditional probability P(y = 1 | x), so Bayes risk is exact rather than
estimated.

Feature ranges: regression kinds on [0, 1]^2. ``moons``: two interleaved
half-annuli (radius 1 +/- 0.1), the second reflected and shifted by
(1, 0.5), roughly [-1.1, 2.1] x [-0.6, 1.1]. ``circles``: rings of radius
1 and 0.5 (+/- 0.05) around the origin.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidInput
from .pointset import PointSet


class DatasetKind(str, Enum):
    SADDLE = "saddle"
    ARCTAN = "arctan"
    LINEAR_PLANE = "linear"
    PARABOLOID = "paraboloid"
    CONSTANT = "constant"
    MOONS = "moons"
    CIRCLES = "circles"
    FLIP_CIRCLES = "flip-circles"
    COIN = "coin"


@dataclass(frozen=True)
class RegressionModel:
    name: str
    fn: object
    grad: object
    dim: int = 2

    def sample(self, n, noise, rng):
        X = rng.random((n, self.dim))
        y = self.fn(X)
        if noise > 0:
            y = y + noise * rng.standard_normal(n)
        return X, y


def _arctan_grad(X):
    g = 1.0 / (1.0 + (X[:, 0] + X[:, 1]) ** 2)
    return np.column_stack([g, g])


REGRESSION = {
    "saddle": RegressionModel(
        "saddle", lambda X: X[:, 0] * X[:, 1], lambda X: X[:, ::-1].copy()),
    "arctan": RegressionModel(
        "arctan", lambda X: np.arctan(X[:, 0] + X[:, 1]), _arctan_grad),
    "linear": RegressionModel(
        "linear", lambda X: X[:, 0] + X[:, 1], lambda X: np.ones_like(X)),
    "paraboloid": RegressionModel(
        "paraboloid", lambda X: X[:, 0] ** 2 + X[:, 1] ** 2, lambda X: 2.0 * X),
    "constant": RegressionModel(
        "constant", lambda X: np.full(len(X), 0.7), lambda X: np.zeros_like(X)),
}


def regression_model(name):
    try:
        return REGRESSION[name]
    except KeyError:
        raise InvalidInput(f"unknown regression generator {name!r}") from None


def _half_annuli(n, noise, rng, band=0.1):
    n0 = n // 2
    n1 = n - n0
    t0 = rng.uniform(0.0, np.pi, n0)
    t1 = rng.uniform(0.0, np.pi, n1)
    r0 = rng.uniform(1.0 - band, 1.0 + band, n0)
    r1 = rng.uniform(1.0 - band, 1.0 + band, n1)
    outer = np.column_stack([r0 * np.cos(t0), r0 * np.sin(t0)])
    inner = np.column_stack([1.0 - r1 * np.cos(t1), 0.5 - r1 * np.sin(t1)])
    X = np.vstack([outer, inner])
    y = np.concatenate([np.zeros(n0), np.ones(n1)])
    if noise > 0:
        X = X + noise * rng.standard_normal(X.shape)
    return X, y


def _rings(n, noise, rng, band=0.05):
    n0 = n // 2
    n1 = n - n0
    t = rng.uniform(0.0, 2.0 * np.pi, n)
    r = np.concatenate([rng.uniform(1.0 - band, 1.0 + band, n0),
                        rng.uniform(0.5 - band, 0.5 + band, n1)])
    X = np.column_stack([r * np.cos(t), r * np.sin(t)])
    y = np.concatenate([np.zeros(n0), np.ones(n1)])
    if noise > 0:
        X = X + noise * rng.standard_normal(X.shape)
    return X, y


@dataclass(frozen=True)
class ClassificationModel:
    """A two-class generator with known conditional probability.

    ``noise`` is Gaussian feature jitter; ``flip`` is a label-flip rate.
    Bayes risk is analytic only when there is no feature jitter.
    """

    name: str
    noise: float = 0.0
    flip: float = 0.0

    def sample(self, n, rng):
        if self.name == "coin":
            X = rng.random((n, 2))
            y = (rng.random(n) < 0.5).astype(np.float64)
            return X, y
        if self.name == "moons":
            X, y = _half_annuli(n, self.noise, rng)
        elif self.name == "circles":
            X, y = _rings(n, self.noise, rng)
        else:
            raise InvalidInput(f"unknown classification generator {self.name!r}")
        if self.flip > 0:
            y = np.where(rng.random(n) < self.flip, 1.0 - y, y)
        return X, y

    def conditional_probability(self, X):
        if self.name == "coin":
            return np.full(len(X), 0.5)
        if self.noise > 0:
            raise InvalidInput("conditional probability is not analytic with feature jitter")
        X = np.asarray(X, dtype=np.float64)
        if self.name == "moons":
            d_in = np.hypot(1.0 - X[:, 0], 0.5 - X[:, 1])
            inner = (np.abs(d_in - 1.0) <= 0.1) & (X[:, 1] <= 0.5)
        else:
            inner = np.hypot(X[:, 0], X[:, 1]) < 0.75
        clean = inner.astype(np.float64)
        return clean * (1.0 - self.flip) + (1.0 - clean) * self.flip

    @property
    def bayes_risk(self):
        """E[min(psi, 1 - psi)], exact for these generators."""
        if self.name == "coin":
            return 0.5
        if self.noise > 0:
            return None
        return min(self.flip, 1.0 - self.flip)


def classification_model(name, noise=0.0, flip=0.0):
    if name == "flip-circles":
        return ClassificationModel("circles", noise, flip)
    if name not in ("moons", "circles", "coin"):
        raise InvalidInput(f"unknown classification generator {name!r}")
    return ClassificationModel(name, noise, flip)


def generate_dataset(kind, n, noise=0.0, seed=0, flip=0.1):
    """Draw ``n`` samples; returns ``(PointSet, responses)``.

    Moons, circles, flip-circles and coin give {0, 1} labels; the rest give
    real responses with Gaussian noise of standard deviation ``noise``.
    """
    kind = DatasetKind(kind)
    if n < 4:
        raise InvalidInput(f"need n >= 4 samples, got {n}")
    rng = np.random.default_rng(seed)
    if kind.value in REGRESSION:
        X, y = REGRESSION[kind.value].sample(n, noise, rng)
    elif kind is DatasetKind.FLIP_CIRCLES:
        X, y = classification_model("flip-circles", noise, flip).sample(n, rng)
    else:
        X, y = classification_model(kind.value, noise).sample(n, rng)
    return PointSet(X, y), y
