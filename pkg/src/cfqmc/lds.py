"""Point sets on the unit cube: pseudorandom, Halton, scrambled + shifted
Halton and midpoint grids.

All randomness flows from a single 64-bit seed through numpy's Philox
counter-based generator (``Philox4x64-10``), keyed by ``SeedSequence(seed)``.
Sub-seeds for independent streams are derived with :func:`derive_seed`, which
uses the ``spawn_key`` mechanism of ``SeedSequence``. Both are specified
bit-exactly by numpy, so generated point sets are reproducible across
platforms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import DimensionMismatchError, GridSizeMismatchError

__all__ = [
    "KINDS",
    "SequenceSpec",
    "PointSet",
    "first_primes",
    "is_prime",
    "make_rng",
    "derive_seed",
    "radical_inverse",
    "scramble_digits",
    "generate",
    "random_shift",
    "grid_spec",
    "midpoint_nodes",
]

KINDS = ("iid-uniform", "halton", "scrambled-shifted-halton", "midpoint-grid")
_HALTON_KINDS = ("halton", "scrambled-shifted-halton")
_UINT64 = 2**64

# largest representable value strictly below one
_BELOW_ONE = np.nextafter(1.0, 0.0)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def first_primes(count: int) -> tuple[int, ...]:
    primes = []
    candidate = 2
    while len(primes) < count:
        if is_prime(candidate):
            primes.append(candidate)
        candidate += 1
    return tuple(primes)


def make_rng(seed: int) -> np.random.Generator:
    """Philox generator keyed from a 64-bit seed."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def derive_seed(seed: int, *keys: int) -> int:
    """Split ``seed`` into an independent 64-bit child seed addressed by ``keys``.

    The same ``(seed, keys)`` always yields the same child; distinct key
    tuples give statistically independent streams.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


@dataclass(frozen=True)
class SequenceSpec:
    """Recipe for a point set.

    Parameters
    ----------
    kind : str
        One of :data:`KINDS`.
    dims : int
        Dimension of the unit cube.
    seed : int
        Unsigned 64-bit seed. Ignored by the deterministic kinds.
    bases : tuple of int, optional
        Pairwise-distinct ascending primes, one per dimension (Halton kinds
        only). Defaults to the first ``dims`` primes.
    resolution : int, optional
        Points per dimension for ``midpoint-grid``.
    """

    kind: str
    dims: int = 1
    seed: int = 0
    bases: tuple[int, ...] | None = None
    resolution: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown sequence kind {self.kind!r}; expected one of {KINDS}")
        if int(self.dims) < 1:
            raise ValueError("dims must be a positive integer")
        if not 0 <= int(self.seed) < _UINT64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.kind in _HALTON_KINDS:
            bases = first_primes(self.dims) if self.bases is None else tuple(int(b) for b in self.bases)
            if len(bases) != self.dims:
                raise DimensionMismatchError(f"need {self.dims} bases, got {len(bases)}")
            if not all(is_prime(b) for b in bases):
                raise ValueError(f"bases must be primes, got {bases}")
            if any(a >= b for a, b in zip(bases, bases[1:])):
                raise ValueError(f"bases must be pairwise distinct and ascending, got {bases}")
            object.__setattr__(self, "bases", bases)
        elif self.bases is not None:
            raise ValueError(f"bases only apply to Halton kinds, not {self.kind!r}")
        if self.kind == "midpoint-grid":
            if self.resolution is None or int(self.resolution) < 1:
                raise ValueError("midpoint-grid needs a positive per-dimension resolution")


@dataclass(frozen=True, eq=False)
class PointSet:
    """``n`` points in ``[0, 1)^dims`` stored as a read-only ``(n, dims)`` array."""

    points: np.ndarray
    spec: SequenceSpec | None = field(default=None)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"expected a non-empty (n, d) array, got shape {pts.shape}")
        if not np.all((pts >= 0.0) & (pts < 1.0)):
            raise ValueError("all coordinates must lie in [0, 1)")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def dims(self) -> int:
        return self.points.shape[1]

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.points.shape == other.points.shape and bool(np.array_equal(self.points, other.points))

    __hash__ = None


def radical_inverse(n, base: int):
    """Reflect the base-``base`` digits of ``n`` about the radix point.

    Accepts a scalar or an integer array; returns a float of matching shape.

    >>> radical_inverse(3, 2)
    0.75
    """
    if base < 2:
        raise ValueError("base must be >= 2")
    idx = np.asarray(n, dtype=np.int64)
    if np.any(idx < 0):
        raise ValueError("n must be non-negative")
    out = np.zeros(idx.shape, dtype=float)
    scale = 1.0 / base
    rest = idx.copy()
    while np.any(rest > 0):
        rest, digit = np.divmod(rest, base)
        out += digit * scale
        scale /= base
    if out.ndim == 0:
        return float(out)
    return out


def _digit_count(base: int) -> int:
    # largest K with base**K <= 2**52, so that integer numerators stay exact
    k, power = 0, 1
    while power * base <= 2**52:
        power *= base
        k += 1
    return k


def scramble_digits(n, base: int, perm) -> tuple[np.ndarray, int]:
    """Permuted radical inverse as an exact integer numerator.

    Every one of the first ``K`` base-``base`` digits of ``n`` (leading zeros
    included) is mapped through ``perm`` and the result is read as the
    fraction ``numerator / base**K``. ``K`` is the largest digit count with
    ``base**K <= 2**52``.

    Returns
    -------
    numerator : ndarray of int64
    n_digits : int
    """
    perm = np.asarray(perm, dtype=np.int64)
    if sorted(perm.tolist()) != list(range(base)):
        raise ValueError(f"perm must be a permutation of range({base})")
    n_digits = _digit_count(base)
    rest = np.asarray(n, dtype=np.int64).copy()
    numerator = np.zeros(rest.shape, dtype=np.int64)
    weight = base ** (n_digits - 1)
    for _ in range(n_digits):
        rest, digit = np.divmod(rest, base)
        numerator += perm[digit] * weight
        weight //= base
    return numerator, n_digits


def _halton(indices: np.ndarray, bases: Sequence[int]) -> np.ndarray:
    return np.column_stack([radical_inverse(indices, b) for b in bases])


def _scrambled_halton(indices: np.ndarray, bases: Sequence[int], perms) -> np.ndarray:
    cols = []
    for base, perm in zip(bases, perms):
        numerator, n_digits = scramble_digits(indices, base, perm)
        cols.append(numerator / float(base**n_digits))
    return np.column_stack(cols)


def _integer_root(n: int, dims: int) -> int | None:
    m = int(round(n ** (1.0 / dims)))
    for cand in (m - 1, m, m + 1):
        if cand >= 1 and cand**dims == n:
            return cand
    return None


def midpoint_nodes(m: int) -> np.ndarray:
    return (2.0 * np.arange(1, m + 1) - 1.0) / (2.0 * m)


def generate(spec: SequenceSpec, n: int) -> PointSet:
    """Build the first ``n`` points described by ``spec``.

    Halton indices start at 1. The scrambled kind draws one digit permutation
    per base (reused across digit positions) followed by a single uniform
    shift vector applied modulo one; all draws come from ``make_rng(spec.seed)``
    in that order.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be a positive integer")
    d = spec.dims
    if spec.kind == "iid-uniform":
        pts = make_rng(spec.seed).random((n, d))
    elif spec.kind == "halton":
        pts = _halton(np.arange(1, n + 1), spec.bases)
    elif spec.kind == "scrambled-shifted-halton":
        rng = make_rng(spec.seed)
        perms = [rng.permutation(b) for b in spec.bases]
        shift = rng.random(d)
        pts = _shift(_scrambled_halton(np.arange(1, n + 1), spec.bases, perms), shift)
    else:
        m = spec.resolution
        if m**d != n:
            raise GridSizeMismatchError(f"midpoint-grid with resolution {m} in {d}d has {m**d} points, not {n}")
        axes = np.meshgrid(*([midpoint_nodes(m)] * d), indexing="ij")
        pts = np.column_stack([a.ravel() for a in axes])
    return PointSet(pts, spec)


def grid_spec(n: int, dims: int = 1) -> SequenceSpec:
    """Midpoint-grid spec for exactly ``n`` points; ``n`` must be a ``dims``-th power."""
    m = _integer_root(int(n), dims)
    if m is None:
        raise GridSizeMismatchError(f"{n} is not a perfect {dims}-th power")
    return SequenceSpec("midpoint-grid", dims=dims, resolution=m)


def _shift(pts: np.ndarray, shift: np.ndarray) -> np.ndarray:
    out = np.mod(pts + shift, 1.0)
    # float rounding of c + s can land on 1.0 exactly
    out[out >= 1.0] = 0.0
    return np.minimum(out, _BELOW_ONE)


def random_shift(ps: PointSet, shift) -> PointSet:
    """Translate every point by ``shift`` modulo one (Cranley-Patterson rotation)."""
    shift = np.atleast_1d(np.asarray(shift, dtype=float))
    if shift.ndim != 1 or shift.shape[0] != ps.dims:
        raise DimensionMismatchError(f"shift has dimension {shift.shape}, point set has {ps.dims}")
    return PointSet(_shift(ps.points, shift))
