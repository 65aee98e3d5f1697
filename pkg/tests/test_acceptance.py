"""Acceptance criteria for the package, one test per criterion.

Each test records a PASS/FAIL line; ``conftest.py`` prints them at the end
of the pytest run. Run standalone with ``python tests/test_acceptance.py``.
"""

import time

import numpy as np
import pytest

from cfqmc.bench import StudyConfig, convergence_study, serialize_config
from cfqmc.cli import main
from cfqmc.control_functional import cf_transform, fit_grid_surrogate, fit_kernel_surrogate, residual_variation
from cfqmc.discrepancy import kh_bound, star_discrepancy_1d, star_discrepancy_exact
from cfqmc.estimate import METHODS, run_estimator
from cfqmc.functions import builtin
from cfqmc.lds import KINDS, PointSet, SequenceSpec, generate, grid_spec

RESULTS = []


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] AC{number} {title}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def fig1_study():
    start = time.perf_counter()
    report = convergence_study(StudyConfig(function="fig1", budget_min=2**4, budget_max=2**12, replicates=20))
    return report, time.perf_counter() - start


def loglog_slope(pairs):
    x, y = np.log([p[0] for p in pairs]), np.log([p[1] for p in pairs])
    return float(np.polyfit(x, y, 1)[0])


def test_ac1_rate_reproduction(fig1_study):
    report, elapsed = fig1_study
    s = {m: report.slopes[m].slope for m in ("mc", "rqmc", "rqmc-cf")}
    ok = -0.7 <= s["mc"] <= -0.3 and s["rqmc"] <= -0.9 and s["rqmc-cf"] <= -1.8 and elapsed <= 60
    detail = f"slopes mc={s['mc']:.3f} rqmc={s['rqmc']:.3f} rqmc-cf={s['rqmc-cf']:.3f}, {elapsed:.1f}s"
    record(1, "rate reproduction", ok, detail)


def test_ac2_magnitude_ordering(fig1_study):
    report, _ = fig1_study
    r = {m: report.row(m, 2**12).rmse for m in ("mc", "rqmc", "rqmc-cf")}
    ok = r["rqmc-cf"] <= r["rqmc"] / 10 and r["rqmc"] <= r["mc"] / 5
    detail = f"rmse@4096 mc={r['mc']:.3e} rqmc={r['rqmc']:.3e} rqmc-cf={r['rqmc-cf']:.3e}"
    record(2, "magnitude ordering", ok, detail)


def midpoint_quadrature(f):
    per_dim = 2**16 if f.dims == 1 else 2**8
    pts = generate(SequenceSpec("midpoint-grid", f.dims, resolution=per_dim), per_dim**f.dims).points
    return float(np.mean(f(pts)))


def test_ac3_integral_preservation():
    cases = [(n, 1) for n in ("fig1", "linear", "constant", "prod-fig1")]
    cases += [(n, 2) for n in ("linear", "constant", "prod-fig1")]
    worst = {1: 0.0, 2: 0.0}
    checked = 0
    for name, dims in cases:
        f = builtin(name, dims)
        for m in (4, 8, 16, 32, 64):
            surrogates = [fit_grid_surrogate(f, m)]
            centers = generate(grid_spec(m**dims, dims), m**dims)
            surrogates.append(fit_kernel_surrogate(f, centers))
            for s in surrogates:
                err = abs(midpoint_quadrature(cf_transform(f, s)) - f.true_integral)
                worst[dims] = max(worst[dims], err)
                checked += 1
    ok = worst[1] <= 1e-6 and worst[2] <= 1e-4
    record(3, "condition (i)", ok, f"{checked} (function, surrogate, m) cases; max error 1d={worst[1]:.1e} 2d={worst[2]:.1e}")


def test_ac4_variation_decay():
    start = time.perf_counter()
    s1 = loglog_slope(residual_variation(builtin("fig1"), [8, 16, 32, 64, 128]))
    s2 = loglog_slope(residual_variation(builtin("prod-fig1", 2), [4, 8, 16, 32]))
    elapsed = time.perf_counter() - start
    ok = abs(s1 + 1) <= 0.25 and abs(s2 + 0.5) <= 0.25 and elapsed <= 120
    record(4, "condition (ii) O(N^-1/d)", ok, f"slope d=1 {s1:.3f}, d=2 {s2:.3f}, {elapsed:.1f}s")


def test_ac5_koksma_hlawka():
    functions = [builtin("fig1"), builtin("linear"), builtin("constant"), builtin("prod-fig1", 1)]
    sizes = (1, 2, 3, 5, 8, 13, 16, 50, 64, 100, 255, 512, 1024)
    pairs, worst_slack = 0, np.inf
    for f in functions:
        for kind in KINDS:
            for n in sizes:
                spec = SequenceSpec(kind, 1, resolution=n) if kind == "midpoint-grid" else SequenceSpec(kind, 1, seed=7 * n)
                ps = generate(spec, n)
                error = abs(np.mean(f(ps.points)) - f.true_integral)
                slack = kh_bound(f, ps) + 1e-10 - error
                worst_slack = min(worst_slack, slack)
                pairs += 1
    ok = pairs >= 200 and worst_slack >= 0
    record(5, "Koksma-Hlawka bound", ok, f"{pairs} pairs, min(bound - error) = {worst_slack:.3e}")


def brute_force_1d(x):
    n = len(x)
    return max(
        max(abs(np.sum(x < t) / n - t), abs(np.sum(x <= t) / n - t)) for t in list(x) + [1.0]
    )


def test_ac6_discrepancy_oracles():
    rng = np.random.default_rng(6)
    worst_brute, worst_cross = 0.0, 0.0
    for _ in range(100):
        x = rng.random(rng.integers(1, 80))
        ps = PointSet(x)
        closed = star_discrepancy_1d(ps).value
        worst_brute = max(worst_brute, abs(closed - brute_force_1d(x)))
        worst_cross = max(worst_cross, abs(star_discrepancy_exact(ps).value - closed))
    single = star_discrepancy_exact(PointSet([[0.5, 0.5]])).value
    ok = worst_brute <= 1e-12 and worst_cross <= 1e-12 and abs(single - 0.75) <= 1e-12
    detail = f"brute-force gap {worst_brute:.1e}, exact-vs-1d gap {worst_cross:.1e}, single point (0.5,0.5) -> {single}"
    record(6, "discrepancy oracles", ok, detail)


def test_ac7_unbiasedness():
    parts, ok = [], True
    for method in ("rqmc-cf", "rqmc"):
        e = run_estimator(method, builtin("fig1"), 128, 200, StudyConfig().seed)
        se = e.std / np.sqrt(200)
        z = (e.value - 2.0) / se
        ok &= abs(z) <= 3
        parts.append(f"{method} mean-2={e.value - 2:.2e} ({z:+.2f} SE)")
    record(7, "unbiasedness", ok, ", ".join(parts))


def test_ac8_exact_degeneracies():
    lin = run_estimator("rqmc-cf", builtin("linear"), 256, 20, StudyConfig().seed)
    ok = all(v == 2.0 for v in lin.replicate_values)
    const = {m: run_estimator(m, builtin("constant"), 256, 20, StudyConfig().seed) for m in METHODS}
    ok &= all(all(v == 1.0 for v in e.replicate_values) and e.value == 1.0 for e in const.values())
    record(8, "exact degeneracies", ok, "rqmc-cf on linear == 2.0 in 20/20 replicates; all methods on constant == 1.0")


def test_ac9_determinism(tmp_path):
    cfg = tmp_path / "study.cfg"
    cfg.write_text(serialize_config(StudyConfig(out_dir=str(tmp_path / "out"))))
    files = ("rows.csv", "slopes.csv", "plot.dat")
    assert main(["study", "--config", str(cfg)]) == 0
    first = {n: (tmp_path / "out" / n).read_bytes() for n in files}
    assert main(["study", "--config", str(cfg)]) == 0
    second = {n: (tmp_path / "out" / n).read_bytes() for n in files}
    record(9, "determinism", first == second, f"{len(files)} files byte-identical across two CLI runs")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
