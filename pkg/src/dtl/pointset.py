from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidInput


@dataclass(frozen=True)
class PointSet:
    """Training features (n, p) and optional responses (n,)."""

    coords: np.ndarray
    responses: np.ndarray | None = None

    def __post_init__(self):
        X = np.ascontiguousarray(np.asarray(self.coords, dtype=np.float64))
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2:
            raise DimensionMismatch(f"coords must be 2-D, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise InvalidInput("coords must be finite")
        object.__setattr__(self, "coords", X)
        if self.responses is not None:
            y = np.asarray(self.responses, dtype=np.float64).reshape(-1)
            if y.shape[0] != X.shape[0]:
                raise DimensionMismatch(f"{y.shape[0]} responses for {X.shape[0]} points")
            if not np.all(np.isfinite(y)):
                raise InvalidInput("responses must be finite")
            object.__setattr__(self, "responses", y)

    @property
    def n(self):
        return self.coords.shape[0]

    @property
    def dim(self):
        return self.coords.shape[1]
