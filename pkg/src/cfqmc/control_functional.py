"""Surrogates with closed-form means and the control-functional transform.

Given a surrogate ``s`` fitted to evaluations of ``φ`` on a design set and its
exact mean ``μ(s)``, the transformed integrand ``φ̂ = φ - s + μ(s)`` has the
same integral as ``φ`` for every fit, and its variation shrinks as ``s``
approaches ``φ``. Averaging ``φ̂`` over a (randomised) QMC point set then
attacks both factors of the Koksma-Hlawka bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy import linalg
from scipy.special import ndtr

from .discrepancy import hk_variation_1d, hk_variation_grid
from .exceptions import DimensionMismatchError, SingularSystemError
from .functions import TestFunction, as_points
from .lds import PointSet

__all__ = [
    "GridSurrogate",
    "KernelSurrogate",
    "TransformedIntegrand",
    "fit_grid_surrogate",
    "fit_kernel_surrogate",
    "default_lengthscale",
    "cf_transform",
    "residual_variation",
    "DEFAULT_RIDGE",
]

DEFAULT_RIDGE = 1e-8
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def default_lengthscale(dims: int) -> float:
    return 0.2 * math.sqrt(dims)


@dataclass(frozen=True, eq=False)
class GridSurrogate:
    """Piecewise-multilinear interpolant on the tensor grid ``{j/(m-1)}^d``."""

    dims: int
    resolution: int
    node_coords: np.ndarray
    node_values: np.ndarray
    analytic_mean: float

    @property
    def n_nodes(self) -> int:
        return self.resolution**self.dims

    def __call__(self, x) -> np.ndarray:
        x = as_points(x, self.dims)
        nodes = self.node_coords
        m = self.resolution
        lo = np.clip(np.searchsorted(nodes, x, side="right") - 1, 0, m - 1)
        hi = np.minimum(lo + 1, m - 1)
        offset = x - nodes[lo]
        width = nodes[hi] - nodes[lo]
        width[width == 0.0] = 1.0  # only at x == 1, where offset is 0

        corners = np.empty((2,) * self.dims + (len(x),))
        for bits in itertools.product((0, 1), repeat=self.dims):
            idx = tuple(np.where(b, hi[:, k], lo[:, k]) for k, b in enumerate(bits))
            corners[bits] = self.node_values[idx]
        # reduce one axis at a time; slope-times-offset keeps linear data exact
        for k in range(self.dims):
            corners = corners[0] + ((corners[1] - corners[0]) / width[:, k]) * offset[:, k]
        return corners

    def derivative(self, x) -> np.ndarray:
        """Cell slope of the 1d interpolant."""
        if self.dims != 1:
            raise DimensionMismatchError("derivative is only available in 1d")
        x = np.asarray(x, dtype=float)
        nodes = self.node_coords
        cell = np.clip(np.searchsorted(nodes, x, side="right") - 1, 0, self.resolution - 2)
        slopes = np.diff(self.node_values) / np.diff(nodes)
        return slopes[cell]


@dataclass(frozen=True, eq=False)
class KernelSurrogate:
    """Squared-exponential kernel ridge regression with a constant intercept."""

    centers: PointSet
    weights: np.ndarray
    lengthscale: float
    ridge: float
    intercept: float
    analytic_mean: float
    residual_norm: float = field(default=0.0)

    @property
    def dims(self) -> int:
        return self.centers.dims

    def gram(self, x) -> np.ndarray:
        x = as_points(x, self.dims)
        return _se_kernel(x, self.centers.points, self.lengthscale)

    def __call__(self, x, chunk: int = 4096) -> np.ndarray:
        x = as_points(x, self.dims)
        out = np.empty(len(x))
        for start in range(0, len(x), chunk):
            block = x[start : start + chunk]
            out[start : start + chunk] = self.intercept + _se_kernel(block, self.centers.points, self.lengthscale) @ self.weights
        return out

    def derivative(self, x) -> np.ndarray:
        if self.dims != 1:
            raise DimensionMismatchError("derivative is only available in 1d")
        x = np.asarray(x, dtype=float).reshape(-1, 1)
        c = self.centers.points
        k = _se_kernel(x, c, self.lengthscale)
        return (k * (c[:, 0][None, :] - x) / self.lengthscale**2) @ self.weights


Surrogate = Union[GridSurrogate, KernelSurrogate]


@dataclass(frozen=True)
class TransformedIntegrand(TestFunction):
    """``x ↦ φ(x) - s(x) + μ(s)``; a :class:`TestFunction` with ``φ``'s integral.

    Each evaluation calls ``base`` exactly once per point.
    """

    base: Optional[TestFunction] = None
    surrogate: Optional[Surrogate] = None


def fit_grid_surrogate(f: TestFunction, m: int) -> GridSurrogate:
    """Interpolate ``f`` on ``m`` endpoint-inclusive nodes per dimension.

    Costs ``m ** f.dims`` evaluations of ``f``. The mean is the tensor
    trapezoid rule applied to the node values, which is the exact integral of
    the multilinear interpolant.
    """
    m = int(m)
    if m < 2:
        raise ValueError(f"grid surrogate needs m >= 2 nodes per dimension, got {m}")
    d = f.dims
    nodes = np.arange(m) / (m - 1)
    mesh = np.meshgrid(*([nodes] * d), indexing="ij")
    values = f(np.column_stack([a.ravel() for a in mesh])).reshape((m,) * d)

    edge = np.ones(m)
    edge[[0, -1]] = 0.5
    weights = edge
    for _ in range(d - 1):
        weights = np.multiply.outer(weights, edge)
    # power-of-two weights make the products exact; one rounding at the division
    mean = math.fsum((weights * values).ravel()) / float((m - 1) ** d)

    nodes.setflags(write=False)
    values.setflags(write=False)
    return GridSurrogate(d, m, nodes, values, mean)


def _se_kernel(x: np.ndarray, y: np.ndarray, lengthscale: float) -> np.ndarray:
    sq = np.zeros((len(x), len(y)))
    for j in range(x.shape[1]):
        sq += (x[:, j][:, None] - y[:, j][None, :]) ** 2
    return np.exp(-sq / (2.0 * lengthscale**2))


def kernel_mean_embedding(centers: np.ndarray, lengthscale: float) -> np.ndarray:
    """``κ(v) = ∫_{[0,1]^d} k(v, u) du`` for the squared-exponential kernel."""
    centers = np.asarray(centers, dtype=float)
    per_dim = lengthscale * _SQRT_2PI * (ndtr((1.0 - centers) / lengthscale) - ndtr(-centers / lengthscale))
    return np.prod(per_dim, axis=1)


def fit_kernel_surrogate(
    f: TestFunction,
    v: PointSet,
    lengthscale: Optional[float] = None,
    ridge: float = DEFAULT_RIDGE,
    fit_intercept: bool = True,
    refine_steps: int = 2,
) -> KernelSurrogate:
    """Kernel ridge surrogate ``b + Σ_i w_i k(x, v_i)`` fitted on the centers ``v``.

    The intercept ``b`` is the sample mean of the targets; the weights solve
    ``(K + ridge·I) w = y - b``. A few steps of iterative refinement tighten
    the solve when the Gram matrix is badly conditioned.
    """
    if v.dims != f.dims:
        raise DimensionMismatchError(f"centers have d={v.dims}, function has d={f.dims}")
    if lengthscale is None:
        lengthscale = default_lengthscale(f.dims)
    if lengthscale <= 0:
        raise ValueError("lengthscale must be positive")
    if ridge < 0:
        raise ValueError("ridge must be non-negative")

    centers = v.points
    y = f(centers)
    intercept = float(np.mean(y)) if fit_intercept else 0.0
    target = y - intercept
    system = _se_kernel(centers, centers, lengthscale)
    system[np.diag_indices_from(system)] += ridge

    if ridge == 0.0 and len(np.unique(centers, axis=0)) < len(centers):
        raise SingularSystemError("coincident centers make the unregularised Gram matrix singular")
    try:
        factor = linalg.cho_factor(system, check_finite=False)
    except linalg.LinAlgError as exc:
        raise SingularSystemError(f"Gram system is not positive definite: {exc}") from None
    weights = linalg.cho_solve(factor, target, check_finite=False)
    for _ in range(refine_steps):
        weights = weights + linalg.cho_solve(factor, target - system @ weights, check_finite=False)
    residual = float(np.linalg.norm(system @ weights - target))

    mean = intercept + float(kernel_mean_embedding(centers, lengthscale) @ weights)
    weights.setflags(write=False)
    return KernelSurrogate(v, weights, float(lengthscale), float(ridge), intercept, mean, residual)


def cf_transform(f: TestFunction, s: Surrogate) -> TransformedIntegrand:
    """Control-functional integrand ``φ - s + μ(s)``.

    Its integral equals ``f.true_integral`` for any surrogate with an exact
    mean. Surrogate evaluations are not charged to ``f``'s budget.
    """
    if f.dims != s.dims:
        raise DimensionMismatchError(f"function has d={f.dims}, surrogate has d={s.dims}")
    mu = s.analytic_mean
    base_eval = f.evaluator

    def evaluator(x):
        return base_eval(x) - s(x) + mu

    derivative = None
    if f.dims == 1 and f.derivative is not None:
        base_deriv = f.derivative

        def derivative(x):
            return base_deriv(x) - s.derivative(x)

    return TransformedIntegrand(f"{f.name}-cf", f.dims, evaluator, f.true_integral, derivative, base=f, surrogate=s)


def residual_variation(f: TestFunction, m_values) -> list[tuple[int, float]]:
    """Variation of the grid-surrogate residual integrand for each resolution.

    Returns ``(node_count, variation)`` pairs. In 1d the variation is exact
    up to quadrature; in 2d it is the grid-differences proxy.
    """
    if f.dims not in (1, 2):
        raise DimensionMismatchError(f"residual_variation supports d in {{1, 2}}, got d={f.dims}")
    out = []
    for m in m_values:
        transformed = cf_transform(f, fit_grid_surrogate(f, m))
        if f.dims == 1:
            value = hk_variation_1d(transformed).value
        else:
            value = hk_variation_grid(transformed).value
        out.append((int(m) ** f.dims, value))
    return out
