"""Integrands with known integrals, plus evaluation counting."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .exceptions import DimensionMismatchError, UnknownNameError

__all__ = ["TestFunction", "EvaluationCounter", "counting", "as_points", "builtin", "BUILTINS"]

TWO_PI = 2.0 * np.pi


def as_points(x, dims: int) -> np.ndarray:
    """Coerce ``x`` to an ``(n, dims)`` float array.

    A scalar or a 1d array is read as a batch of points when ``dims == 1``
    and as a single point otherwise.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr[:, None] if dims == 1 else arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != dims:
        raise DimensionMismatchError(f"expected points of dimension {dims}, got array of shape {np.shape(x)}")
    return arr


@dataclass(frozen=True)
class TestFunction:
    """An integrand on ``[0, 1]^dims`` with an analytically known integral.

    ``evaluator`` maps an ``(n, dims)`` array to ``n`` values. ``derivative``
    is optional and only used in 1d, where it maps an ``(n,)`` array to
    ``φ'`` values.
    """

    __test__ = False  # keep pytest from collecting this class

    name: str
    dims: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    true_integral: float
    derivative: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.evaluator(as_points(x, self.dims)), dtype=float)


class EvaluationCounter:
    """Tally of integrand evaluations, one per point."""

    def __init__(self):
        self.count = 0

    def __repr__(self):
        return f"EvaluationCounter(count={self.count})"


def counting(f: TestFunction) -> tuple[TestFunction, EvaluationCounter]:
    """Wrap ``f`` so that every evaluated point increments a counter."""
    counter = EvaluationCounter()
    inner = f.evaluator

    def evaluator(x):
        counter.count += len(x)
        return inner(x)

    return replace(f, evaluator=evaluator), counter


def _fig1(x):
    return np.sin(TWO_PI * x) + 4.0 * x


def _fig1_prime(x):
    return TWO_PI * np.cos(TWO_PI * x) + 4.0


def _fig1_product(dims):
    def evaluator(x):
        return np.prod(_fig1(x), axis=1)

    return TestFunction("prod-fig1", dims, evaluator, 2.0**dims, _fig1_prime if dims == 1 else None)


def _linear(dims):
    # 4/d * sum(x): integral 2 in every dimension, multilinear
    def evaluator(x):
        return 4.0 * x[:, 0] if dims == 1 else (4.0 / dims) * np.sum(x, axis=1)

    deriv = (lambda x: np.full(np.shape(x), 4.0)) if dims == 1 else None
    return TestFunction("linear", dims, evaluator, 2.0, deriv)


def _constant(dims):
    return TestFunction(
        "constant", dims, lambda x: np.ones(len(x)), 1.0, (lambda x: np.zeros(np.shape(x))) if dims == 1 else None
    )


def _fig1_1d(dims):
    if dims != 1:
        raise DimensionMismatchError("fig1 is one-dimensional; use prod-fig1 for d > 1")
    return TestFunction("fig1", 1, lambda x: _fig1(x[:, 0]), 2.0, _fig1_prime)


BUILTINS = {
    "fig1": _fig1_1d,
    "linear": _linear,
    "constant": _constant,
    "prod-fig1": _fig1_product,
}


def builtin(name: str, dims: int = 1) -> TestFunction:
    """Look up a built-in test function.

    ``fig1`` is ``sin(2πx) + 4x`` (d = 1, integral 2); ``linear`` is
    ``(4/d) Σ x_j`` (integral 2); ``constant`` is 1; ``prod-fig1`` is
    ``Π_j (sin(2πx_j) + 4x_j)`` with integral ``2^d``.
    """
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise UnknownNameError(f"unknown test function {name!r}; expected one of {sorted(BUILTINS)}") from None
    if int(dims) < 1:
        raise ValueError("dims must be positive")
    return factory(int(dims))
