"""Statistical checks of simulated fields and samplers.

Empirical variograms on regular grids compared with ``1 - C(h, u)``,
Monte-Carlo transform oracles, normality tests, dimple detection and the
spectral/substitution frequency consistency check.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import stats

from .fields import FieldRealization
from .model import GneitingModel, GridSpec, SpaceTimePointSet
from .rng import realization_seed
from .simulation import Method, simulate_field
from .spectral import build_spectral_ensemble
from .substitution import build_substitution_ensemble

_INDEX_TOL = 1e-6


# ------------------------------------------------------------------ variograms

@dataclass
class EmpiricalVariogram:
    """Semivariances of one realization along one family of lags.

    In ``"spatial"`` mode ``fixed_lag`` is the time lag and ``lag_axis``
    holds spatial lags: a scalar means "this distance along every axis,
    pooled", a vector is a single offset.  In ``"temporal"`` mode
    ``fixed_lag`` is the spatial lag vector and ``lag_axis`` the time lags.
    """

    mode: str
    fixed_lag: object
    lag_axis: list
    values: np.ndarray
    pair_counts: np.ndarray
    realization_id: int | None = None

    def lag_vectors(self, k: int) -> list[tuple[np.ndarray, float]]:
        """``(h, u)`` of every reported lag, in model coordinates."""
        out = []
        for lag in self.lag_axis:
            if self.mode == "temporal":
                out.append((np.asarray(self.fixed_lag, dtype=float), float(lag)))
            else:
                arr = np.atleast_1d(np.asarray(lag, dtype=float))
                h = np.concatenate([arr, np.zeros(k - 1)]) if arr.size == 1 else arr
                out.append((h, float(self.fixed_lag)))
        return out


def _to_index(value: float, mesh: float, what: str) -> int:
    q = value / mesh
    i = round(q)
    if abs(q - i) > _INDEX_TOL:
        raise ValueError(f"{what}={value:g} is not a multiple of the grid mesh {mesh:g}")
    return int(i)


def _pairs(arr: np.ndarray, offset: Sequence[int]):
    """Flattened values at ``s`` and ``s + offset`` for every grid node where both exist."""
    sa, sb = [], []
    for o, n in zip(offset, arr.shape):
        if abs(o) >= n:
            return None, None
        sa.append(slice(max(0, -o), n - max(0, o)))
        sb.append(slice(max(0, o), n - max(0, -o)))
    return arr[tuple(sa)].ravel(), arr[tuple(sb)].ravel()


def _semivariance(arr, offsets):
    total, count = 0.0, 0
    for off in offsets:
        a, b = _pairs(arr, off)
        if a is None:
            continue
        d = a - b
        total += float(d @ d)
        count += d.size
    if count == 0:
        raise ValueError(f"lag offsets {offsets} have no pairs on this grid")
    return 0.5 * total / count, count


def empirical_variogram(field: FieldRealization, mode: str, fixed_lag, lag_grid,
                        realization_id: int | None = None) -> EmpiricalVariogram:
    """Method-of-moments semivariance ``0.5 * mean (Z(s) - Z(s + lag))**2`` per lag.

    Lags must be whole multiples of the grid meshes; vector lags such as
    ``(6, 6)`` are node offsets times the mesh.
    """
    g: GridSpec | None = field.points.grid
    if g is None:
        raise ValueError("empirical variograms need a field on a regular grid")
    arr = field.as_grid()
    k = g.k
    lags = list(lag_grid)

    def spatial_index(h):
        h = np.atleast_1d(np.asarray(h, dtype=float))
        if h.size != k:
            raise ValueError(f"spatial lag {h.tolist()} must have length k={k}")
        return [_to_index(v, m, "spatial lag") for v, m in zip(h, g.mesh)]

    values, counts = [], []
    if mode == "spatial":
        dt = _to_index(float(fixed_lag), g.t_mesh, "time lag")
        for lag in lags:
            arr_lag = np.atleast_1d(np.asarray(lag, dtype=float))
            if arr_lag.size == 1:
                offs = []
                for d in range(k):
                    idx = [0] * k
                    idx[d] = _to_index(float(arr_lag[0]), g.mesh[d], "spatial lag")
                    offs.append([dt, *idx])
            else:
                offs = [[dt, *spatial_index(arr_lag)]]
            v, c = _semivariance(arr, offs)
            values.append(v)
            counts.append(c)
    elif mode == "temporal":
        hi = spatial_index(fixed_lag)
        for lag in lags:
            v, c = _semivariance(arr, [[_to_index(float(lag), g.t_mesh, "time lag"), *hi]])
            values.append(v)
            counts.append(c)
    else:
        raise ValueError(f"mode must be 'spatial' or 'temporal', got {mode!r}")
    return EmpiricalVariogram(mode, fixed_lag, lags, np.array(values), np.array(counts, dtype=int),
                              realization_id)


@dataclass
class VariogramComparison:
    """Mean empirical variogram across realizations against ``1 - C``."""

    label: str
    mode: str
    fixed_lag: object
    lag_axis: list
    mean: np.ndarray
    se: np.ndarray
    variance: np.ndarray
    theory: np.ndarray
    n_realizations: int
    n_se: float = 3.0

    @property
    def within(self) -> np.ndarray:
        return np.abs(self.mean - self.theory) <= self.n_se * self.se + 1e-12

    @property
    def passed(self) -> bool:
        return bool(np.all(self.within))

    @property
    def worst_z(self) -> float:
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.abs(self.mean - self.theory) / self.se
        return float(np.nanmax(np.where(self.se > 0, z, 0.0)))


def compare_variograms(model: GneitingModel, variograms: Sequence[EmpiricalVariogram],
                       label: str = "", n_se: float = 3.0) -> VariogramComparison:
    """Standard errors come from the spread across realizations, not from pair counts."""
    if len(variograms) < 2:
        raise ValueError("need at least two realizations for a standard error")
    first = variograms[0]
    stack = np.stack([v.values for v in variograms])
    theory = np.array([1.0 - model.covariance(h, u) for h, u in first.lag_vectors(model.k)])
    var = stack.var(axis=0, ddof=1)
    return VariogramComparison(label or _curve_label(first.mode, first.fixed_lag), first.mode,
                               first.fixed_lag, first.lag_axis, stack.mean(axis=0),
                               np.sqrt(var / len(variograms)), var, theory, len(variograms), n_se)


def _curve_label(mode, fixed_lag):
    if mode == "spatial":
        return f"spatial u={float(fixed_lag):g}"
    return "temporal h=(" + ",".join(f"{v:g}" for v in np.atleast_1d(fixed_lag)) + ")"


@dataclass(frozen=True)
class VariogramProtocol:
    """Which curves to estimate: spatial curves at fixed time lags, temporal curves at fixed spatial lags."""

    spatial_u: tuple[float, ...] = (0.0, 0.2, 1.6)
    spatial_lags: tuple[float, ...] = tuple(float(i) for i in range(1, 21))
    temporal_h: tuple[tuple[float, ...], ...] = ((0.0, 0.0), (6.0, 6.0), (10.0, 10.0))
    temporal_lags: tuple[float, ...] = tuple(round(0.2 * i, 10) for i in range(1, 21))

    def curves(self):
        for u in self.spatial_u:
            yield "spatial", u, self.spatial_lags
        for h in self.temporal_h:
            yield "temporal", h, self.temporal_lags


@dataclass
class ProtocolResult:
    method: str
    comparisons: list[VariogramComparison]
    per_realization: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.comparisons)


def run_variogram_protocol(model: GneitingModel, method, p: int, grid: GridSpec,
                           n_realizations: int, master_seed: int,
                           protocol: VariogramProtocol = VariogramProtocol(),
                           n_se: float = 3.0, eps: float | None = None) -> ProtocolResult:
    """Simulate ``n_realizations`` fields on ``grid`` and compare every curve with theory."""
    method = Method(method)
    points = SpaceTimePointSet.from_grid(grid)
    curves = list(protocol.curves())
    collected = {_curve_label(m, f): [] for m, f, _ in curves}
    kwargs = {} if eps is None else {"eps": eps}
    for i in range(n_realizations):
        fld = simulate_field(model, method, p, points, realization_seed(master_seed, i), **kwargs)
        for mode, fixed, lags in curves:
            collected[_curve_label(mode, fixed)].append(empirical_variogram(fld, mode, fixed, lags, i))
    comps = [compare_variograms(model, vs, label, n_se) for label, vs in collected.items()]
    return ProtocolResult(method.value, comps, collected)


def fluctuation_ordering(a: ProtocolResult, b: ProtocolResult) -> float:
    """Fraction of nonzero lags at which realizations of ``a`` fluctuate at least as much as those of ``b``."""
    hits, total = 0, 0
    for ca, cb in zip(a.comparisons, b.comparisons):
        mask = (ca.variance > 0) | (cb.variance > 0)
        hits += int(np.sum(ca.variance[mask] >= cb.variance[mask]))
        total += int(mask.sum())
    return hits / total if total else float("nan")


def comparison_rows(comparisons: Iterable[VariogramComparison]):
    for c in comparisons:
        for lag, m, se, th, ok in zip(c.lag_axis, c.mean, c.se, c.theory, c.within):
            lag_txt = " ".join(f"{v:g}" for v in np.atleast_1d(lag))
            yield {"curve": c.label, "lag": lag_txt, "empirical_mean": f"{m:.10g}", "se": f"{se:.6g}",
                   "lower": f"{m - c.n_se * se:.10g}", "upper": f"{m + c.n_se * se:.10g}",
                   "theoretical": f"{th:.10g}", "within_band": str(bool(ok)).lower()}


def write_comparison_csv(path, comparisons) -> None:
    rows = list(comparison_rows(comparisons))
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]) if rows else ["curve"])
        w.writeheader()
        w.writerows(rows)


def format_comparisons(comparisons: Iterable[VariogramComparison]) -> str:
    buf = io.StringIO()
    for c in comparisons:
        status = "PASS" if c.passed else "FAIL"
        buf.write(f"{status}  {c.label:<24s} realizations={c.n_realizations} "
                  f"lags={len(c.lag_axis)} max|dev|/se={c.worst_z:.2f} (limit {c.n_se:g})\n")
    return buf.getvalue()


# ------------------------------------------------------------------ oracles

@dataclass
class OracleReport:
    args: np.ndarray
    empirical: np.ndarray
    analytic: np.ndarray
    n_draws: int
    kind: str

    @property
    def errors(self) -> np.ndarray:
        return np.abs(self.empirical - self.analytic)

    @property
    def max_abs_error(self) -> float:
        return float(self.errors.max())

    @property
    def tolerance(self) -> float:
        return 4.0 / math.sqrt(self.n_draws)

    @property
    def passed(self) -> bool:
        return self.max_abs_error <= self.tolerance

    def summary(self) -> str:
        return (f"{self.kind} oracle: max|err|={self.max_abs_error:.5f} tol={self.tolerance:.5f} "
                f"{'PASS' if self.passed else 'FAIL'}")


def transform_oracle(sampler: Callable[[int], np.ndarray], analytic: Callable, arg_grid,
                     n_draws: int, kind: str = "cf") -> OracleReport:
    """Compare the empirical characteristic function (``kind="cf"``, real part of a
    symmetric law) or Laplace transform (``kind="laplace"``) of ``sampler(n_draws)``
    with ``analytic`` on ``arg_grid``; passes iff the error stays within ``4/sqrt(n)``."""
    if n_draws < 10_000:
        raise ValueError("transform oracles need at least 1e4 draws")
    x = np.asarray(sampler(n_draws), dtype=float).reshape(-1)
    if x.size != n_draws:
        raise ValueError(f"sampler returned {x.size} draws, expected {n_draws}")
    args = np.asarray(arg_grid, dtype=float)
    if kind == "cf":
        emp = np.array([np.mean(np.cos(s * x)) for s in args])
    elif kind == "laplace":
        emp = np.array([np.mean(np.exp(-s * x)) for s in args])
    else:
        raise ValueError(f"kind must be 'cf' or 'laplace', got {kind!r}")
    ana = np.asarray([analytic(s) for s in args], dtype=float)
    return OracleReport(args, emp, ana, n_draws, kind)


# ------------------------------------------------------------------ dimple

@dataclass(frozen=True)
class DimpleReport:
    has_dimple: bool
    argmax_u: float
    c_at_zero: float
    c_max: float


def detect_dimple(model: GneitingModel, h, u_grid) -> DimpleReport:
    """Whether ``u -> C(h, u)`` peaks away from ``u = 0`` on the grid."""
    u = np.asarray(u_grid, dtype=float)
    if not np.any(u == 0):
        raise ValueError("u_grid must contain 0")
    h = np.asarray(h, dtype=float)
    c = np.asarray(model.covariance(np.broadcast_to(h, (u.size, model.k)), u))
    c0 = float(c[u == 0][0])
    i = int(np.argmax(c))
    return DimpleReport(bool(c[i] > c0 + 1e-9), float(u[i]), c0, float(c[i]))


# ------------------------------------------------------------------ normality

@dataclass(frozen=True)
class NormalityReport:
    n: int
    ad_statistic: float
    ad_critical: float
    ks_statistic: float
    ks_pvalue: float
    significance: float = 0.01

    @property
    def passed(self) -> bool:
        return self.ad_statistic < self.ad_critical


def normality_report(fields, significance: float = 0.01) -> NormalityReport:
    """Anderson-Darling test on pooled, standardized values (KS reported alongside)."""
    chunks = [f.values if isinstance(f, FieldRealization) else np.asarray(f, dtype=float).ravel()
              for f in fields]
    x = np.concatenate(chunks)
    if x.size < 10_000:
        raise ValueError(f"normality tests need at least 1e4 pooled values, got {x.size}")
    z = (x - x.mean()) / x.std(ddof=1)
    ad = stats.anderson(z, dist="norm")
    levels = np.asarray(ad.significance_level) / 100.0
    pos = np.flatnonzero(np.isclose(levels, significance))
    if pos.size == 0:
        raise ValueError(f"significance must be one of {levels.tolist()}")
    ks = stats.kstest(z, "norm")
    return NormalityReport(x.size, float(ad.statistic), float(ad.critical_values[pos[0]]),
                           float(ks.statistic), float(ks.pvalue), significance)


# ------------------------------------------------------------------ method consistency

@dataclass(frozen=True)
class FrequencyConsistency:
    ks_statistic: float
    pvalue: float
    significance: float = 0.01

    @property
    def passed(self) -> bool:
        return self.pvalue > self.significance


def frequency_consistency(model: GneitingModel, n: int, seed: int,
                          significance: float = 0.01) -> FrequencyConsistency:
    """Two-sample KS test between ``|Omega|**2`` of the spectral method and
    ``|sqrt(2R) w|**2`` of the substitution method, from independent seeds."""
    spec = build_spectral_ensemble(model, n, realization_seed(seed, 0)).frequencies_squared()
    sub = build_substitution_ensemble(model, [0.0], n, realization_seed(seed, 1))
    freq = np.sum(sub.spatial_frequencies() ** 2, axis=1)
    res = stats.ks_2samp(spec, freq)
    return FrequencyConsistency(float(res.statistic), float(res.pvalue), significance)
