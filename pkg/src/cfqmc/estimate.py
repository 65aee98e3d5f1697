"""MC, QMC, RQMC and RQMC+CF estimators with evaluation-budget accounting."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .control_functional import DEFAULT_RIDGE, cf_transform, fit_grid_surrogate, fit_kernel_surrogate
from .exceptions import InsufficientBudgetError, UnknownNameError
from .functions import TestFunction, builtin, counting
from .lds import SequenceSpec, derive_seed, generate

__all__ = [
    "METHODS",
    "SURROGATES",
    "Estimate",
    "TestFunction",
    "builtin",
    "cf_split",
    "run_estimator",
    "estimate_curve",
    "replicate_rmse_curve",
]

METHODS = ("mc", "qmc", "rqmc", "rqmc-cf")
SURROGATES = ("grid", "kernel")
# stable stream keys for seed splitting; do not reorder
_METHOD_KEY = {name: i for i, name in enumerate(METHODS)}


@dataclass(frozen=True)
class Estimate:
    """Replicated estimate of an integral.

    ``budget`` is the number of integrand evaluations charged to a single
    replicate, surrogate fitting included. ``std`` is the sample standard
    deviation of the replicate values (zero with a single replicate).
    """

    method: str
    budget: int
    value: float
    replicate_values: tuple
    std: float
    abs_error: float
    rmse: float
    true_integral: float
    fit_evaluations: int = 0

    @property
    def replicates(self) -> int:
        return len(self.replicate_values)


def cf_split(budget: int, dims: int) -> tuple[int, int]:
    """Per-dimension grid resolution and u-set size for an RQMC+CF run.

    The grid takes the largest ``m`` with ``m**dims <= budget // 2``; the
    rest of the budget goes to the u-set.
    """
    half = budget // 2
    m = int(round(half ** (1.0 / dims)))
    while m**dims > half:
        m -= 1
    while (m + 1) ** dims <= half:
        m += 1
    if m < 2:
        raise InsufficientBudgetError(f"rqmc-cf in {dims}d needs budget >= {2 * 2**dims}, got {budget}")
    return m, budget - m**dims


def _summarise(method, f, values, budget, fit_evals=0):
    values = np.asarray(values, dtype=float)
    value = float(np.mean(values))
    std = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
    rmse = float(np.sqrt(np.mean((values - f.true_integral) ** 2)))
    return Estimate(
        method=method,
        budget=int(budget),
        value=value,
        replicate_values=tuple(values.tolist()),
        std=std,
        abs_error=abs(value - f.true_integral),
        rmse=rmse,
        true_integral=float(f.true_integral),
        fit_evaluations=int(fit_evals),
    )


def run_estimator(
    method: str,
    f: TestFunction,
    budget: int,
    replicates: int = 1,
    seed: int = 0,
    surrogate: str = "grid",
    lengthscale: Optional[float] = None,
    ridge: float = DEFAULT_RIDGE,
) -> Estimate:
    """Estimate ``∫φ`` with ``budget`` evaluations of ``φ`` per replicate.

    Parameters
    ----------
    method : {'mc', 'qmc', 'rqmc', 'rqmc-cf'}
        ``qmc`` is deterministic and always uses one replicate. ``rqmc-cf``
        fits a surrogate once on a grid of about ``budget / 2`` nodes and
        averages the transformed integrand over a scrambled, shifted Halton
        set holding the rest of the budget in each replicate.
    seed : int
        Root seed. Replicate ``r`` at this budget draws from
        ``derive_seed(seed, method_key, budget, r)``.
    surrogate : {'grid', 'kernel'}
        Surrogate family for ``rqmc-cf``. The kernel surrogate is centred on
        a midpoint grid with the same node count as the grid surrogate.
    """
    if method not in METHODS:
        raise UnknownNameError(f"unknown method {method!r}; expected one of {METHODS}")
    if surrogate not in SURROGATES:
        raise UnknownNameError(f"unknown surrogate {surrogate!r}; expected one of {SURROGATES}")
    budget = int(budget)
    if budget < 2:
        raise InsufficientBudgetError(f"budget must be >= 2, got {budget}")
    replicates = 1 if method == "qmc" else int(replicates)
    if replicates < 1:
        raise ValueError("replicates must be positive")

    d = f.dims
    key = _METHOD_KEY[method]
    counted, counter = counting(f)

    def sub_seed(r):
        return derive_seed(seed, key, budget, r)

    if method == "qmc":
        pts = generate(SequenceSpec("halton", d), budget).points
        return _summarise(method, f, [np.mean(counted(pts))], counter.count)

    if method in ("mc", "rqmc"):
        kind = "iid-uniform" if method == "mc" else "scrambled-shifted-halton"
        values = []
        for r in range(replicates):
            pts = generate(SequenceSpec(kind, d, seed=sub_seed(r)), budget).points
            values.append(np.mean(counted(pts)))
        return _summarise(method, f, values, counter.count // replicates)

    m, n_u = cf_split(budget, d)
    if surrogate == "grid":
        s = fit_grid_surrogate(counted, m)
    else:
        centers = generate(SequenceSpec("midpoint-grid", d, resolution=m), m**d)
        s = fit_kernel_surrogate(counted, centers, lengthscale, ridge)
    fit_evals = counter.count
    transformed = cf_transform(counted, s)
    values = []
    for r in range(replicates):
        pts = generate(SequenceSpec("scrambled-shifted-halton", d, seed=sub_seed(r)), n_u).points
        values.append(np.mean(transformed(pts)))
    per_replicate = (counter.count - fit_evals) // replicates
    return _summarise(method, f, values, fit_evals + per_replicate, fit_evals)


def estimate_curve(method, f, budgets, replicates=1, seed=0, **kwargs) -> list[Estimate]:
    budgets = [int(b) for b in budgets]
    if any(a >= b for a, b in zip(budgets, budgets[1:])):
        raise ValueError(f"budgets must be strictly increasing, got {budgets}")
    return [run_estimator(method, f, b, replicates, seed, **kwargs) for b in budgets]


def replicate_rmse_curve(method, f, budgets, replicates=1, seed=0, **kwargs) -> list[tuple[int, float, float]]:
    """``(budget, rmse, std)`` for each budget; deterministic given ``seed``."""
    return [(e.budget, e.rmse, e.std) for e in estimate_curve(method, f, budgets, replicates, seed, **kwargs)]
