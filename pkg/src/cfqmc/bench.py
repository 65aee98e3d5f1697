"""Convergence studies: run estimators over a budget ladder, fit log-log
rates, and write CSV / plot-data reports."""

from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, field, fields
from typing import NamedTuple, Optional

import numpy as np

from .control_functional import DEFAULT_RIDGE
from .estimate import METHODS, SURROGATES, estimate_curve
from .exceptions import CFQMCError, ConfigError, DegenerateFitError
from .functions import BUILTINS, builtin

__all__ = [
    "StudyConfig",
    "Row",
    "RateFit",
    "ConvergenceReport",
    "parse_config",
    "serialize_config",
    "load_config",
    "convergence_study",
    "fit_rate",
    "check_rate_ordering",
    "emit_report",
    "RATE_ORDER",
    "ROWS_HEADER",
]

ROWS_HEADER = ("method", "budget", "rmse", "std", "mean_estimate", "true_integral")
SLOPES_HEADER = ("method", "slope", "stderr", "n_used", "flag")
PLOT_HEADER = ("method", "log2_budget", "log2_rmse", "log2_std")
# expected ordering of convergence rates, fastest first
RATE_ORDER = ("rqmc-cf", "rqmc", "mc")


class StudyError(CFQMCError, RuntimeError):
    """A study cell failed; the message names the cell."""


@dataclass(frozen=True)
class StudyConfig:
    function: str = "fig1"
    dims: int = 1
    methods: tuple = METHODS
    budget_min: int = 16
    budget_max: int = 4096
    budget_factor: int = 2
    replicates: int = 20
    seed: int = 1234
    surrogate: str = "grid"
    lengthscale: Optional[float] = None
    ridge: float = DEFAULT_RIDGE
    slope_skip: int = 2
    check_rates: bool = True
    min_slope_gap: float = 0.0
    out_dir: str = "results"

    def __post_init__(self):
        methods = tuple(self.methods)
        object.__setattr__(self, "methods", methods)
        if not methods:
            raise ConfigError("methods must name at least one estimator")
        unknown = [m for m in methods if m not in METHODS]
        if unknown:
            raise ConfigError(f"unknown methods {unknown}; expected a subset of {METHODS}")
        if len(set(methods)) != len(methods):
            raise ConfigError(f"duplicate methods in {methods}")
        if self.function not in BUILTINS:
            raise ConfigError(f"unknown function {self.function!r}; expected one of {sorted(BUILTINS)}")
        if self.surrogate not in SURROGATES:
            raise ConfigError(f"unknown surrogate {self.surrogate!r}; expected one of {SURROGATES}")
        if self.dims < 1 or self.replicates < 1 or self.budget_min < 2 or self.budget_factor < 2:
            raise ConfigError("dims, replicates >= 1; budget_min, budget_factor >= 2")
        if self.lengthscale is not None and not self.lengthscale > 0:
            raise ConfigError("lengthscale must be positive or 'auto'")
        if self.ridge < 0 or self.slope_skip < 0 or self.min_slope_gap < 0:
            raise ConfigError("ridge, slope_skip and min_slope_gap must be non-negative")
        if len(self.budgets) < 2:
            raise ConfigError(f"need at least two budgets for slope fitting, got {list(self.budgets)}")
        if len(self.budgets) - self.slope_skip < 2:
            raise ConfigError("slope_skip leaves fewer than two budgets in the fitting window")

    @property
    def budgets(self) -> tuple:
        out, b = [], self.budget_min
        while b <= self.budget_max:
            out.append(b)
            b *= self.budget_factor
        return tuple(out)


_FIELD_TYPES = {f.name: f.type for f in fields(StudyConfig)}


def _format_value(value) -> str:
    if value is None:
        return "auto"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_value(key: str, text: str):
    kind = _FIELD_TYPES[key]
    try:
        if key == "methods":
            return tuple(t.strip() for t in text.split(",") if t.strip())
        if key == "lengthscale":
            return None if text == "auto" else float(text)
        if kind == "bool":
            if text.lower() not in ("true", "false"):
                raise ValueError(text)
            return text.lower() == "true"
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
    except ValueError:
        raise ConfigError(f"bad value for {key!r}: {text!r}") from None
    return text


def serialize_config(config: StudyConfig) -> str:
    """Flat ``key = value`` text, one line per field, in declaration order."""
    return "".join(f"{k} = {_format_value(v)}\n" for k, v in asdict(config).items())


def parse_config(text: str, **overrides) -> StudyConfig:
    """Parse ``key = value`` lines; blank lines and ``#`` comments are ignored.

    Keyword ``overrides`` (already typed) win over file values.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _parse_value(key, value.strip())
    values.update({k: v for k, v in overrides.items() if v is not None})
    return StudyConfig(**values)


def load_config(path, **overrides) -> StudyConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), **overrides)


class Row(NamedTuple):
    method: str
    budget: int
    rmse: float
    std: float
    mean_estimate: float
    true_integral: float


class RateFit(NamedTuple):
    slope: float
    stderr: float
    n_used: int
    excluded: tuple = ()

    @property
    def defined(self) -> bool:
        return math.isfinite(self.slope)


@dataclass
class ConvergenceReport:
    rows: list
    slopes: dict
    config: StudyConfig
    violations: list = field(default_factory=list)

    def rows_for(self, method: str) -> list:
        return [r for r in self.rows if r.method == method]

    def row(self, method: str, budget: int) -> Row:
        (match,) = [r for r in self.rows if r.method == method and r.budget == budget]
        return match


def fit_rate(rows) -> RateFit:
    """Least-squares slope of ``log2(rmse)`` against ``log2(budget)``.

    Rows with a non-positive or non-finite rmse are excluded and listed in
    ``RateFit.excluded``. Raises :class:`DegenerateFitError` when fewer than
    two rows remain. The standard error is zero for a perfect fit and NaN
    when only two rows are used.
    """
    used, excluded = [], []
    for budget, rmse in rows:
        if rmse > 0 and math.isfinite(rmse):
            used.append((budget, rmse))
        else:
            excluded.append((budget, rmse))
    if len(used) < 2:
        raise DegenerateFitError(f"need two rows with rmse > 0, excluded {excluded}")
    x = np.log2([b for b, _ in used])
    y = np.log2([r for _, r in used])
    xc = x - x.mean()
    sxx = float(xc @ xc)
    slope = float(xc @ (y - y.mean())) / sxx
    if len(used) > 2:
        resid = y - y.mean() - slope * xc
        stderr = math.sqrt(float(resid @ resid) / (len(used) - 2) / sxx)
    else:
        stderr = math.nan
    return RateFit(slope, stderr, len(used), tuple(excluded))


def check_rate_ordering(slopes: dict, min_gap: float = 0.0) -> list:
    """Pairs in :data:`RATE_ORDER` whose fitted slopes are out of order.

    Only methods with defined slopes take part. A pair passes when the
    faster method's slope is below the slower one's by more than ``min_gap``
    (strictly below when ``min_gap`` is zero).
    """
    present = [m for m in RATE_ORDER if m in slopes and slopes[m].defined]
    problems = []
    for fast, slow in zip(present, present[1:]):
        gap = slopes[slow].slope - slopes[fast].slope
        if not (gap > min_gap if min_gap == 0 else gap >= min_gap):
            problems.append(
                f"slope({fast}) = {slopes[fast].slope:.3f} is not below slope({slow}) = "
                f"{slopes[slow].slope:.3f} by {min_gap}"
            )
    return problems


def convergence_study(config: StudyConfig) -> ConvergenceReport:
    """Run every (method, budget) cell of ``config`` and fit per-method rates.

    Slopes use the budgets after the first ``config.slope_skip``. A method
    whose errors are all zero gets a NaN slope instead of an exception.
    """
    f = builtin(config.function, config.dims)
    budgets = config.budgets
    kwargs = dict(surrogate=config.surrogate, lengthscale=config.lengthscale, ridge=config.ridge)
    rows, slopes = [], {}
    for method in config.methods:
        try:
            estimates = estimate_curve(method, f, budgets, config.replicates, config.seed, **kwargs)
        except CFQMCError as exc:
            # re-run cell by cell to name the failing one
            for b in budgets:
                try:
                    estimate_curve(method, f, [b], config.replicates, config.seed, **kwargs)
                except CFQMCError as cell_exc:
                    raise StudyError(f"cell (method={method}, budget={b}) failed: {cell_exc}") from cell_exc
            raise StudyError(f"method {method} failed: {exc}") from exc
        for b, e in zip(budgets, estimates):
            rows.append(Row(method, b, e.rmse, e.std, e.value, e.true_integral))
        window = [(b, e.rmse) for b, e in zip(budgets, estimates)][config.slope_skip :]
        try:
            slopes[method] = fit_rate(window)
        except DegenerateFitError:
            slopes[method] = RateFit(math.nan, math.nan, 0, tuple(window))
    report = ConvergenceReport(rows, slopes, config)
    if config.check_rates:
        report.violations = check_rate_ordering(slopes, config.min_slope_gap)
    return report


def _num(x) -> str:
    return repr(float(x))


def _log2(x) -> str:
    with np.errstate(divide="ignore"):
        return _num(np.log2(x))


def emit_report(report: ConvergenceReport, config: Optional[StudyConfig] = None) -> dict:
    """Write ``rows.csv``, ``slopes.csv`` and ``plot.dat`` under ``config.out_dir``.

    Each file starts with the config echoed as ``#`` comment lines, followed
    by a header row. Returns the written paths keyed by file role.
    """
    config = config or report.config
    echo = "".join(f"# {line}\n" for line in serialize_config(config).splitlines())
    rows_text = [",".join(ROWS_HEADER)]
    plot_text = [",".join(PLOT_HEADER)]
    for r in report.rows:
        rows_text.append(",".join([r.method, str(r.budget), _num(r.rmse), _num(r.std), _num(r.mean_estimate), _num(r.true_integral)]))
        plot_text.append(",".join([r.method, _log2(r.budget), _log2(r.rmse), _log2(r.std)]))
    slopes_text = [",".join(SLOPES_HEADER)]
    for method in config.methods:
        fit = report.slopes[method]
        flag = "ok" if fit.defined else "undefined"
        slopes_text.append(",".join([method, _num(fit.slope), _num(fit.stderr), str(fit.n_used), flag]))

    paths = {
        "rows": os.path.join(config.out_dir, "rows.csv"),
        "slopes": os.path.join(config.out_dir, "slopes.csv"),
        "plot": os.path.join(config.out_dir, "plot.dat"),
    }
    contents = {"rows": rows_text, "slopes": slopes_text, "plot": plot_text}
    try:
        os.makedirs(config.out_dir, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {config.out_dir!r}: {exc}") from exc
    for role, path in paths.items():
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(echo + "\n".join(contents[role]) + "\n")
        except OSError as exc:
            raise OSError(f"cannot write {role} file {path!r}: {exc}") from exc
    return paths
