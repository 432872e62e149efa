"""The evaluatable field type shared by all modules.

A field is a vectorized pair of callables: ``eval`` maps an ``(N, dim)``
array of points to ``(N,)`` values, ``grad`` maps it to ``(N, dim)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ParameterError

ArrayFn = Callable[[np.ndarray], np.ndarray]


def as_points(x, dim: int) -> np.ndarray:
    """Coerce ``x`` to a float array of shape ``(N, dim)``.

    For ``dim == 1`` a scalar or flat array is read as a list of points; for
    ``dim > 1`` a flat array of length ``dim`` is read as a single point.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1) if dim == 1 else arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise ParameterError(f"points of shape {np.shape(x)} do not match dim={dim}")
    return arr


@dataclass(frozen=True)
class ScalarField:
    """Real-valued function on R^dim with an optional analytic gradient."""

    dim: int
    eval: ArrayFn
    grad: Optional[ArrayFn] = None
    label: str = ""

    def __post_init__(self):
        if not 1 <= self.dim <= 3:
            raise ParameterError(f"dim must be in 1..3, got {self.dim}")

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.eval(as_points(x, self.dim)), dtype=float)

    def gradient(self, x) -> np.ndarray:
        if self.grad is None:
            raise ParameterError(f"field {self.label!r} has no gradient attached")
        pts = as_points(x, self.dim)
        return np.asarray(self.grad(pts), dtype=float).reshape(pts.shape)

    @property
    def has_grad(self) -> bool:
        return self.grad is not None

    def __str__(self):
        return self.label or f"<field dim={self.dim}>"
