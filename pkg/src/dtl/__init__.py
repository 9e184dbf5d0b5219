"""Delaunay triangulation learner: piecewise-linear regression and
classification over the Delaunay mesh of the training features."""
__version__ = "0.1.0"

from . import _backend  # noqa: E402
from .errors import *  # noqa: E402,F401,F403
from .pointset import PointSet  # noqa: E402
from .predicates import Sign, in_circumsphere, orient, solve_barycentric  # noqa: E402
from .triangulation import (  # noqa: E402
    InsideSimplex, OutsideHull, Triangulation, build_delaunay, covering_edge_average,
    hull_contains, locate, random_triangulation,
)
from .interpolation import evaluate, evaluate_gradient, simplex_gradient, up_norm  # noqa: E402
from .regularizer import (  # noqa: E402
    CurvatureReport, regularization_gradient, regularization_value,
)
from .optimizer import DtlModel, FitConfig, FitState, LossKind, classify, fit, predict  # noqa: E402
from .datasets import DatasetKind, generate_dataset  # noqa: E402
from .evaluation import (  # noqa: E402
    RiskReport, ScalingReport, classification_risk_experiment, consistency_experiment,
    geometric_loss, interpolation_error_experiment, local_adaptivity_experiment,
    optimality_experiment, scaling_experiment,
)
from .io import (  # noqa: E402
    load_model, read_dataset, read_mesh, save_model, write_dataset, write_mesh,
    write_surface_mesh,
)

backend = _backend.name
