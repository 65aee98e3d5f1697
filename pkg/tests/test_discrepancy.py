import itertools

import numpy as np
import pytest
from scipy.integrate import quad

from cfqmc.discrepancy import (
    BudgetExceededError,
    hk_variation_1d,
    hk_variation_grid,
    kh_bound,
    star_discrepancy_1d,
    star_discrepancy_exact,
)
from cfqmc.exceptions import DimensionMismatchError
from cfqmc.functions import TestFunction, builtin
from cfqmc.lds import KINDS, PointSet, SequenceSpec, generate, random_shift

# ∫|2π cos(2πx) + 4| dx = 4 + 2(φ(a) - φ(1 - a)) with cos(2πa) = -2/π
_A = np.arccos(-2 / np.pi) / (2 * np.pi)
FIG1_VARIATION = 4 + 2 * ((np.sin(2 * np.pi * _A) + 4 * _A) - (np.sin(2 * np.pi * (1 - _A)) + 4 * (1 - _A)))


def brute_force_1d(x):
    """sup over anchored intervals [0, t) and [0, t], checked at every jump."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    best = 0.0
    for t in list(x) + [1.0]:
        best = max(best, abs(np.sum(x < t) / n - t), abs(np.sum(x <= t) / n - t))
    return best


def test_fig1_variation_oracles_agree():
    value, _ = quad(lambda x: abs(2 * np.pi * np.cos(2 * np.pi * x) + 4), 0, 1, points=[_A, 1 - _A])
    assert FIG1_VARIATION == pytest.approx(value, abs=1e-12)
    assert FIG1_VARIATION == pytest.approx(4.842054649412, abs=1e-11)


@pytest.mark.parametrize(
    "points, expected",
    [
        ([0.125, 0.375, 0.625, 0.875], 0.125),
        ([0.0, 0.5], 0.5),
        ([0.5], 0.5),
    ],
)
def test_star_discrepancy_1d_examples(points, expected):
    result = star_discrepancy_1d(PointSet(points))
    assert result.value == pytest.approx(expected, abs=1e-15)
    assert result.method == "exact-1d" and result.n == len(points) and result.dims == 1


def test_star_discrepancy_1d_matches_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(100):
        x = rng.random(rng.integers(1, 60))
        assert star_discrepancy_1d(PointSet(x)).value == pytest.approx(brute_force_1d(x), abs=1e-12)


def test_star_discrepancy_1d_wrong_dimension():
    with pytest.raises(DimensionMismatchError):
        star_discrepancy_1d(PointSet(np.full((3, 2), 0.5)))


def dense_box_scan(pts, resolution=401):
    """Lower bound on D* from a lattice of open anchored boxes."""
    grid = np.linspace(0, 1, resolution)
    best = 0.0
    for a, b in itertools.product(grid, grid):
        inside = np.mean((pts[:, 0] < a) & (pts[:, 1] < b))
        best = max(best, abs(inside - a * b))
    return best


@pytest.mark.parametrize(
    "points, expected",
    [
        # closed box at (0.5, 0.5) holds the point: 1 - 0.25
        ([[0.5, 0.5]], 0.75),
        # the empty open box [0, 0.9) x [0, 1) has volume 0.9, which beats
        # the 0.81 of the box just below the points
        ([[0.9, 0.9], [0.9, 0.9]], 0.9),
    ],
)
def test_star_discrepancy_exact_2d_examples(points, expected):
    result = star_discrepancy_exact(PointSet(points))
    assert result.value == pytest.approx(expected, abs=1e-15)
    assert result.method == "exact-enumeration" and result.dims == 2
    assert dense_box_scan(np.array(points)) <= expected + 1e-12


def test_star_discrepancy_exact_agrees_with_1d():
    rng = np.random.default_rng(1)
    for _ in range(100):
        ps = PointSet(rng.random(rng.integers(1, 40)))
        assert star_discrepancy_exact(ps).value == pytest.approx(star_discrepancy_1d(ps).value, abs=1e-12)


def test_star_discrepancy_exact_2d_against_dense_boxes():
    rng = np.random.default_rng(2)
    pts = rng.random((7, 2))
    exact = star_discrepancy_exact(PointSet(pts)).value
    scan = dense_box_scan(pts)
    assert scan <= exact + 1e-12
    assert exact - scan < 0.01


def test_star_discrepancy_exact_budget():
    ps = generate(SequenceSpec("halton", 3), 200)
    with pytest.raises(BudgetExceededError):
        star_discrepancy_exact(ps)
    small = generate(SequenceSpec("halton", 3), 20)
    assert 0 < star_discrepancy_exact(small).value < 1


@pytest.mark.parametrize("n", [8, 16, 32, 64])
def test_halton_discrepancy_improves_when_doubled(n):
    spec = SequenceSpec("halton", 1)
    assert star_discrepancy_1d(generate(spec, 2 * n)).value < star_discrepancy_1d(generate(spec, n)).value


@pytest.mark.parametrize("m", [1, 4, 33, 100])
def test_shifted_midpoint_grid_discrepancy_band(m):
    grid = generate(SequenceSpec("midpoint-grid", 1, resolution=m), m)
    for shift in np.linspace(0, 1, 37, endpoint=False):
        value = star_discrepancy_1d(random_shift(grid, [shift])).value
        assert 1 / (2 * m) - 1e-15 <= value <= 2 / m + 1e-15


@pytest.mark.parametrize(
    "name, expected",
    [("linear", 4.0), ("constant", 0.0), ("fig1", FIG1_VARIATION)],
)
def test_hk_variation_1d_builtins(name, expected):
    result = hk_variation_1d(builtin(name))
    assert result.value == pytest.approx(expected, abs=1e-6)
    assert result.method == "derivative-quadrature-1d" and result.resolution == 2**16


@pytest.mark.parametrize("name", ["linear", "constant", "fig1"])
def test_hk_variation_refinement_is_stable(name):
    f = builtin(name)
    assert abs(hk_variation_1d(f, 2**17).value - hk_variation_1d(f, 2**16).value) < 1e-6


def test_hk_variation_finite_difference_fallback():
    f = builtin("fig1")
    bare = TestFunction("fig1-bare", 1, f.evaluator, 2.0)
    assert hk_variation_1d(bare).value == pytest.approx(FIG1_VARIATION, abs=1e-6)


def test_hk_variation_1d_rejects_2d():
    with pytest.raises(DimensionMismatchError):
        hk_variation_1d(builtin("prod-fig1", 2))


def test_grid_variation_proxy_on_separable_product():
    # V_HK of x*y anchored at 1 is ∫∫1 + ∫1 + ∫1 = 3
    f = TestFunction("xy", 2, lambda x: x[:, 0] * x[:, 1], 0.25)
    assert hk_variation_grid(f).value == pytest.approx(3.0, abs=1e-12)


def test_kh_bound_examples():
    grid = generate(SequenceSpec("midpoint-grid", 1, resolution=4), 4)
    lin = builtin("linear")
    assert kh_bound(lin, grid) == pytest.approx(0.5, abs=1e-12)
    assert abs(np.mean(lin(grid.points)) - 2.0) == 0.0
    assert kh_bound(builtin("constant"), generate(SequenceSpec("halton", 1), 10)) == 0.0


def test_kh_bound_fig1_halton_64():
    f = builtin("fig1")
    ps = generate(SequenceSpec("halton", 1), 64)
    error = abs(np.mean(f(ps.points)) - 2.0)
    assert error <= kh_bound(f, ps)


def test_kh_bound_holds_across_point_sets():
    functions = [builtin("fig1"), builtin("linear"), builtin("constant"), builtin("prod-fig1", 1)]
    pairs = 0
    for f in functions:
        for kind in KINDS:
            for n in (1, 2, 7, 64, 100, 1024):
                if kind == "midpoint-grid":
                    spec = SequenceSpec(kind, 1, resolution=n)
                else:
                    spec = SequenceSpec(kind, 1, seed=n)
                ps = generate(spec, n)
                error = abs(np.mean(f(ps.points)) - f.true_integral)
                assert error <= kh_bound(f, ps) + 1e-10
                pairs += 1
    assert pairs == 96


def test_kh_bound_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        kh_bound(builtin("fig1"), PointSet(np.full((2, 2), 0.5)))
