"""Star discrepancy, Hardy-Krause variation, and the Koksma-Hlawka bound."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .exceptions import BudgetExceededError, DimensionMismatchError
from .functions import TestFunction
from .lds import PointSet

__all__ = [
    "DiscrepancyResult",
    "VariationResult",
    "star_discrepancy_1d",
    "star_discrepancy_exact",
    "star_discrepancy",
    "hk_variation_1d",
    "hk_variation_grid",
    "kh_bound",
    "DEFAULT_OPERATION_BUDGET",
    "DEFAULT_RESOLUTION",
    "FD_STEP",
]

DEFAULT_OPERATION_BUDGET = 10**8
DEFAULT_RESOLUTION = 2**16
FD_STEP = 1e-6


@dataclass(frozen=True)
class DiscrepancyResult:
    value: float
    method: str  # exact-1d | exact-enumeration | upper-bound
    n: int
    dims: int

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class VariationResult:
    value: float
    method: str  # derivative-quadrature-1d | grid-differences
    resolution: int

    def __float__(self):
        return self.value


def star_discrepancy_1d(ps: PointSet) -> DiscrepancyResult:
    """Exact star discrepancy of a 1d point set.

    Uses the sorted-point closed form
    ``1/(2N) + max_i |x_(i) - (2i - 1)/(2N)|``.
    """
    if ps.dims != 1:
        raise DimensionMismatchError(f"star_discrepancy_1d needs a 1d point set, got d={ps.dims}")
    x = np.sort(ps.points[:, 0])
    n = len(x)
    targets = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)
    value = 0.5 / n + float(np.max(np.abs(x - targets)))
    return DiscrepancyResult(min(value, 1.0), "exact-1d", n, 1)


def star_discrepancy_exact(
    ps: PointSet, max_operations: int = DEFAULT_OPERATION_BUDGET, chunk: int = 4096
) -> DiscrepancyResult:
    """Exact star discrepancy by enumerating critical box corners.

    Candidate upper corners are the product of the per-dimension coordinate
    values together with 1.0. At each corner ``y`` both the open box (strict
    dominance) and the closed box (weak dominance) are scored, which covers
    the supremum over all anchored boxes. Cost is roughly ``N^d * N * d``
    comparisons; exceeding ``max_operations`` raises
    :class:`BudgetExceededError`.
    """
    pts = ps.points
    n, d = pts.shape
    axes = [np.unique(np.append(pts[:, j], 1.0)) for j in range(d)]
    n_corners = int(np.prod([len(a) for a in axes]))
    cost = n_corners * n * d
    if cost > max_operations:
        raise BudgetExceededError(
            f"exact enumeration needs ~{cost:.3g} steps (> {max_operations:.3g}); "
            "use star_discrepancy_1d or fewer points"
        )

    worst = 0.0
    rows = max(1, chunk // max(1, n))
    for block in _corner_blocks(axes, rows):
        vol = np.prod(block, axis=1)
        below = pts[None, :, :] < block[:, None, :]
        at_or_below = pts[None, :, :] <= block[:, None, :]
        n_open = np.all(below, axis=2).sum(axis=1)
        n_closed = np.all(at_or_below, axis=2).sum(axis=1)
        local = np.maximum(vol - n_open / n, n_closed / n - vol)
        worst = max(worst, float(local.max()))
    return DiscrepancyResult(min(max(worst, 0.0), 1.0), "exact-enumeration", n, d)


def _corner_blocks(axes, rows):
    it = itertools.product(*axes)
    while True:
        block = list(itertools.islice(it, rows))
        if not block:
            return
        yield np.array(block, dtype=float)


def star_discrepancy(ps: PointSet) -> DiscrepancyResult:
    """Exact star discrepancy, picking the closed form in 1d."""
    if ps.dims == 1:
        return star_discrepancy_1d(ps)
    return star_discrepancy_exact(ps)


def _derivative_1d(f: TestFunction):
    if f.derivative is not None:
        return f.derivative

    def central(x):
        lo = np.clip(x - FD_STEP, 0.0, 1.0)
        hi = np.clip(x + FD_STEP, 0.0, 1.0)
        return (f(hi) - f(lo)) / (hi - lo)

    return central


def hk_variation_1d(f: TestFunction, resolution: int = DEFAULT_RESOLUTION) -> VariationResult:
    """Total variation ``∫_0^1 |φ'(x)| dx`` by the composite midpoint rule.

    In one dimension this coincides with the Hardy-Krause variation of a C¹
    function. Without a supplied derivative, central differences with step
    ``FD_STEP`` are used.
    """
    if f.dims != 1:
        raise DimensionMismatchError(f"hk_variation_1d needs a 1d function, got d={f.dims}")
    resolution = int(resolution)
    if resolution < 1:
        raise ValueError("resolution must be positive")
    x = (np.arange(resolution) + 0.5) / resolution
    dphi = np.asarray(_derivative_1d(f)(x), dtype=float)
    return VariationResult(float(np.mean(np.abs(dphi))), "derivative-quadrature-1d", resolution)


def hk_variation_grid(f: TestFunction, mesh: int = 256) -> VariationResult:
    """Grid-differences proxy for the 2d Hardy-Krause variation (anchored at 1).

    Sums absolute mixed second differences over the mesh plus absolute first
    differences along the edges ``x_2 = 1`` and ``x_1 = 1``. This is a proxy;
    rates, not absolute values, are meaningful.
    """
    if f.dims != 2:
        raise DimensionMismatchError(f"hk_variation_grid is implemented for d=2, got d={f.dims}")
    t = np.linspace(0.0, 1.0, int(mesh))
    xx, yy = np.meshgrid(t, t, indexing="ij")
    values = f(np.column_stack([xx.ravel(), yy.ravel()])).reshape(xx.shape)
    mixed = np.abs(np.diff(np.diff(values, axis=0), axis=1)).sum()
    edge_x = np.abs(np.diff(values[:, -1])).sum()
    edge_y = np.abs(np.diff(values[-1, :])).sum()
    return VariationResult(float(mixed + edge_x + edge_y), "grid-differences", int(mesh))


def kh_bound(f: TestFunction, ps: PointSet, resolution: int = DEFAULT_RESOLUTION) -> float:
    """Koksma-Hlawka bound ``V(φ) · D*`` on the error of the plain average over ``ps``.

    Only one-dimensional inputs are supported, since the variation factor is
    computed exactly only there.
    """
    if f.dims != ps.dims:
        raise DimensionMismatchError(f"function has d={f.dims}, point set has d={ps.dims}")
    variation = hk_variation_1d(f, resolution).value
    if variation == 0.0:
        return 0.0
    return variation * star_discrepancy_1d(ps).value
