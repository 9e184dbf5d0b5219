"""Fitting the location parameters psi with Adam.

The objective is ``sum_i loss(y_i, psi_i) + lam * R(psi)``: at a training
point the interpolant equals its own parameter, so the data term never
needs point location. The triangulation depends only on the features and
is built once; simplex geometry is recomputed every iteration.

The update is standard Adam (squared second moment, fixed decay rates,
bias-corrected), starting from ``psi = y``. Adam with a fixed step is not
monotone, and near the optimum it jitters at the scale of the step, so the
fit returns the iterate with the lowest objective seen. The start is one of
the candidates, so a fit never ends worse than it began.
"""
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from .errors import DimensionMismatch, InvalidInput, NonFiniteObjective
from .interpolation import evaluate_many, simplex_geometry
from .pointset import PointSet
from .regularizer import value_and_gradient
from .triangulation import as_coords, build_delaunay


class LossKind(str, Enum):
    SQUARED = "squared"
    ABSOLUTE = "absolute"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class FitConfig:
    lam: float = 0.0
    loss: LossKind = LossKind.SQUARED
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step_size: float = 0.01
    eta: float | None = None  # None -> 1e-6 * |y|
    max_iters: int = 5000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "loss", LossKind(self.loss))
        if self.lam < 0:
            raise InvalidInput("lambda must be >= 0")
        if self.step_size <= 0:
            raise InvalidInput("step size must be > 0")
        if self.max_iters < 1:
            raise InvalidInput("max_iters must be >= 1")
        if self.eta is not None and self.eta <= 0:
            raise InvalidInput("eta must be > 0")

    def to_dict(self):
        d = asdict(self)
        d["loss"] = self.loss.value
        return d


@dataclass
class FitState:
    psi: np.ndarray
    m: np.ndarray
    v: np.ndarray
    t: int = 0
    objective_trace: list = field(default_factory=list)
    converged: bool = False
    best_iteration: int = 0
    objective: float = float("nan")


@dataclass(frozen=True, eq=False)
class DtlModel:
    points: PointSet
    responses: np.ndarray
    tri: object
    psi: np.ndarray
    loss: LossKind
    lam: float

    @property
    def dim(self):
        return self.tri.dim


def _labels_pm(y):
    if not np.all((y == 0) | (y == 1)):
        raise InvalidInput("exponential loss needs labels in {0, 1}")
    return 2.0 * y - 1.0


def loss_value_and_grad(responses, psi, loss):
    """Summed loss over training points and its gradient in psi.

    Exponential loss maps labels 0/1 to -1/+1 and uses ``exp(-y psi)``.
    The absolute-loss subgradient at a tie is 0.
    """
    y = np.asarray(responses, dtype=np.float64)
    psi = np.asarray(psi, dtype=np.float64)
    if y.shape != psi.shape:
        raise DimensionMismatch(f"{y.shape} responses vs {psi.shape} parameters")
    loss = LossKind(loss)
    r = psi - y
    if loss is LossKind.SQUARED:
        return float(np.sum(r * r)), 2.0 * r
    if loss is LossKind.ABSOLUTE:
        return float(np.sum(np.abs(r))), np.sign(r)
    s = _labels_pm(y)
    e = np.exp(-s * psi)
    return float(np.sum(e)), -s * e


def objective(tri, responses, psi, lam, loss):
    lv, lg = loss_value_and_grad(responses, psi, loss)
    if lam == 0:
        return lv, lg
    rv, rg = value_and_gradient(tri, psi, simplex_geometry(tri, psi))
    return lv + lam * rv, lg + lam * rg


def fit(points, responses=None, config=None, tri=None):
    """Fit a model; returns ``(DtlModel, FitState)``.

    ``state`` holds the raw Adam run (``psi``, ``m``, ``v`` of the last step,
    and ``objective_trace[k]``, the objective at the k-th iterate). The model
    carries the parameters of ``state.best_iteration``; ``state.objective``
    is their objective.

    ``points`` may be a PointSet carrying the responses. A prebuilt ``tri``
    over the same points may be passed to skip triangulation.
    """
    config = config or FitConfig()
    if isinstance(points, PointSet):
        ps = points if responses is None else PointSet(points.coords, responses)
    else:
        ps = PointSet(as_coords(points), responses)
    if ps.responses is None:
        raise InvalidInput("responses are required")
    y = ps.responses
    if config.loss is LossKind.EXPONENTIAL:
        _labels_pm(y)
    if tri is None:
        tri = build_delaunay(ps.coords)
    eta = config.eta if config.eta is not None else 1e-6 * float(np.linalg.norm(y))

    psi = y.copy()
    state = FitState(psi=psi, m=np.zeros_like(y), v=np.zeros_like(y))
    best_obj, best_psi = np.inf, psi
    b1, b2, eps, lr = config.beta1, config.beta2, config.epsilon, config.step_size
    with np.errstate(over="raise", invalid="raise"):
        for t in range(1, config.max_iters + 1):
            try:
                obj, g = objective(tri, y, psi, config.lam, config.loss)
            except FloatingPointError as exc:
                raise NonFiniteObjective(f"objective overflow at iteration {t}") from exc
            if not np.isfinite(obj) or not np.all(np.isfinite(g)):
                raise NonFiniteObjective(f"non-finite objective at iteration {t}")
            state.objective_trace.append(obj)
            if obj < best_obj:
                best_obj, best_psi, state.best_iteration = obj, psi, t - 1
            state.m = b1 * state.m + (1.0 - b1) * g
            state.v = b2 * state.v + (1.0 - b2) * (g * g)
            m_hat = state.m / (1.0 - b1 ** t)
            v_hat = state.v / (1.0 - b2 ** t)
            new = psi - lr * m_hat / (np.sqrt(v_hat) + eps)
            state.t = t
            moved = float(np.linalg.norm(new - psi))
            psi = new
            if moved <= eta:
                state.converged = True
                break
        try:
            final, _ = objective(tri, y, psi, config.lam, config.loss)
        except FloatingPointError as exc:
            raise NonFiniteObjective("objective overflow at the final iterate") from exc
    if not np.isfinite(final):
        raise NonFiniteObjective("non-finite final objective")
    state.objective_trace.append(final)
    if final < best_obj:
        best_obj, best_psi, state.best_iteration = final, psi, len(state.objective_trace) - 1
    state.psi = psi
    state.objective = float(best_obj)
    model = DtlModel(ps, y, tri, best_psi.copy(), config.loss, float(config.lam))
    return model, state


def predict(model, queries):
    Q = np.asarray(queries, dtype=np.float64).reshape(-1, model.dim)
    return evaluate_many(model.tri, model.psi, Q)


def classify(model, queries):
    """Labels ``1{F(x) > 1/2}``."""
    return (predict(model, queries) > 0.5).astype(np.int64)
