"""Serial-correlation-robust inference.

Long-run variances use the Bartlett kernel with weight 1 - j/(L+1) at lag j
(Newey-West). Small-sample scaling n/(n-k) is applied to the sandwich meat,
so bandwidth 0 reproduces the classical one-sample t and the textbook OLS
covariance on homoskedastic fixtures. The circular block bootstrap follows
Politis-Romano: fixed-length blocks with wraparound, percentile intervals.
Sharpe equality uses the Jobson-Korkie statistic with Memmel's variance
correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.stats import rankdata

from .timeseries import TRADING_DAYS_PER_YEAR, Series


def _values(x) -> np.ndarray:
    if isinstance(x, Series):
        return np.asarray(x.values, dtype=np.float64)
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("expected a one-dimensional sample")
    return arr


@dataclass(frozen=True)
class MeanTest:
    mean: float
    se: float
    t: float
    bandwidth: int
    n: int


def newey_west_mean_test(x, bandwidth: int) -> MeanTest:
    """t-test of zero mean with a Bartlett long-run variance at the given lag
    truncation. bandwidth 0 degenerates to the classical one-sample t."""
    v = _values(x)
    n = len(v)
    if bandwidth < 0:
        raise ValueError("bandwidth must be >= 0")
    if n < 2:
        raise ValueError("need at least two observations")
    if bandwidth >= n:
        raise ValueError(f"bandwidth {bandwidth} must be < n ({n})")
    if np.min(v) == np.max(v):
        # exact check: demeaning a non-dyadic constant leaves float dust
        raise ValueError("long-run variance is not positive (constant series)")
    m = float(np.mean(v))
    e = v - m
    gamma0 = float(np.dot(e, e)) / n
    lrv = gamma0
    for j in range(1, bandwidth + 1):
        w = 1.0 - j / (bandwidth + 1.0)
        lrv += 2.0 * w * float(np.dot(e[j:], e[:-j])) / n
    lrv *= n / (n - 1.0)
    if lrv <= 0.0:
        raise ValueError("long-run variance is not positive")
    se = math.sqrt(lrv / n)
    return MeanTest(mean=m, se=se, t=m / se, bandwidth=bandwidth, n=n)


@dataclass(frozen=True)
class OlsFit:
    coef: np.ndarray       # intercept first
    se: np.ndarray
    t: np.ndarray
    resid: np.ndarray
    bandwidth: int
    n: int


def hac_ols(y, X, bandwidth: int) -> OlsFit:
    """OLS with Bartlett (Newey-West) standard errors; an intercept column is
    prepended. bandwidth 0 gives heteroskedasticity-only (White) errors."""
    yv = _values(y)
    Xm = np.asarray(X, dtype=np.float64)
    if Xm.ndim == 1:
        Xm = Xm[:, None]
    n = len(yv)
    if Xm.shape[0] != n:
        raise ValueError("y and X lengths differ")
    if bandwidth < 0 or bandwidth >= n:
        raise ValueError("bandwidth must satisfy 0 <= bandwidth < n")
    Z = np.column_stack([np.ones(n), Xm])
    k = Z.shape[1]
    if n <= k:
        raise ValueError("need more observations than regressors")
    if np.linalg.matrix_rank(Z) < k:
        raise ValueError("regressor matrix is rank deficient")

    XtX = Z.T @ Z
    coef = np.linalg.solve(XtX, Z.T @ yv)
    resid = yv - Z @ coef

    zu = Z * resid[:, None]
    S = (zu.T @ zu) / n
    for j in range(1, bandwidth + 1):
        w = 1.0 - j / (bandwidth + 1.0)
        G = (zu[j:].T @ zu[:-j]) / n
        S += w * (G + G.T)
    S *= n / (n - k)
    bread = np.linalg.inv(XtX / n)
    cov = bread @ S @ bread / n
    se = np.sqrt(np.diag(cov))
    return OlsFit(coef=coef, se=se, t=coef / se, resid=resid, bandwidth=bandwidth, n=n)


@dataclass(frozen=True)
class BootstrapSpec:
    block: int = 63
    iterations: int = 10_000
    seed: int = 0
    confidence: float = 0.95

    def __post_init__(self):
        if self.block < 1:
            raise ValueError("block length must be >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError("confidence must be in (0, 1)")


@dataclass(frozen=True)
class BootstrapResult:
    point: float
    ci_lo: float
    ci_hi: float
    spec: BootstrapSpec

    @property
    def width(self) -> float:
        return self.ci_hi - self.ci_lo


def _stat_sharpe(rows: np.ndarray) -> np.ndarray:
    mu = rows.mean(axis=1)
    sd = rows.std(axis=1, ddof=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = mu / sd * math.sqrt(TRADING_DAYS_PER_YEAR)
    out[sd == 0.0] = np.nan
    return out

def _stat_cagr(rows: np.ndarray) -> np.ndarray:
    n = rows.shape[1]
    growth = np.prod(1.0 + rows, axis=1)
    return growth ** (TRADING_DAYS_PER_YEAR / n) - 1.0

_NAMED_STATS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "sharpe": _stat_sharpe,
    "cagr": _stat_cagr,
}

_MAX_REDRAW_ROUNDS = 100


def circular_block_bootstrap(
    returns, spec: BootstrapSpec, statistic: str | Callable = "sharpe"
) -> BootstrapResult:
    """Percentile CI for a statistic of a daily return series.

    Resamples are ceil(n/block) wraparound blocks truncated to n. Resamples
    where the statistic is undefined (e.g. zero volatility under "sharpe")
    are redrawn, with a hard retry limit. Deterministic in spec.seed and
    independent of any parallelism in the caller.
    """
    v = _values(returns)
    n = len(v)
    if n < 2:
        raise ValueError("need at least two observations")
    if isinstance(statistic, str):
        try:
            stat_rows = _NAMED_STATS[statistic]
        except KeyError:
            raise ValueError(f"unknown statistic {statistic!r}") from None
    else:
        fn = statistic
        def stat_rows(rows: np.ndarray) -> np.ndarray:
            return np.asarray([fn(row) for row in rows], dtype=np.float64)

    point = float(stat_rows(v[None, :])[0])
    if not np.isfinite(point):
        raise ValueError("statistic undefined on the original sample")

    b = spec.block
    nblocks = -(-n // b)  # ceil
    rng = np.random.default_rng(spec.seed)
    offsets = np.arange(b)

    def draw(k: int) -> np.ndarray:
        starts = rng.integers(0, n, size=(k, nblocks))
        idx = (starts[:, :, None] + offsets[None, None, :]) % n
        return v[idx.reshape(k, nblocks * b)[:, :n]]

    stats = stat_rows(draw(spec.iterations))
    for _ in range(_MAX_REDRAW_ROUNDS):
        bad = ~np.isfinite(stats)
        if not bad.any():
            break
        stats[bad] = stat_rows(draw(int(bad.sum())))
    else:
        raise ValueError("bootstrap retry limit exceeded; statistic undefined too often")

    lo = (1.0 - spec.confidence) / 2.0
    ci_lo, ci_hi = np.quantile(stats, [lo, 1.0 - lo])
    return BootstrapResult(point=point, ci_lo=float(ci_lo), ci_hi=float(ci_hi), spec=spec)


@dataclass(frozen=True)
class SharpeEquality:
    z: float
    p: float
    sharpe_1: float
    sharpe_2: float


def sharpe_equality_test(r1, r2) -> SharpeEquality:
    """Two-sided z-test of equal Sharpe ratios for two aligned return series
    (Jobson-Korkie form, Memmel-corrected variance). Scale-free: computed on
    per-period ratios."""
    a = _values(r1)
    c = _values(r2)
    if len(a) != len(c):
        raise ValueError("series lengths differ")
    T = len(a)
    if T < 3:
        raise ValueError("need at least three observations")
    if np.min(a) == np.max(a) or np.min(c) == np.max(c):
        raise ValueError("zero volatility in an input series")
    mu1, mu2 = float(np.mean(a)), float(np.mean(c))
    s1, s2 = float(np.std(a, ddof=1)), float(np.std(c, ddof=1))
    if s1 == 0.0 or s2 == 0.0:
        raise ValueError("zero volatility in an input series")
    cov = float(np.dot(a - mu1, c - mu2)) / (T - 1)
    rho = cov / (s1 * s2)
    sr1, sr2 = mu1 / s1, mu2 / s2

    num = s2 * mu1 - s1 * mu2
    if num == 0.0:
        return SharpeEquality(z=0.0, p=1.0, sharpe_1=sr1, sharpe_2=sr2)
    theta = (
        2.0 * (1.0 - rho)
        + 0.5 * (sr1 * sr1 + sr2 * sr2)
        - sr1 * sr2 * rho * rho
    ) / T
    if theta <= 0.0:
        raise ValueError("degenerate variance in Sharpe difference")
    z = (sr1 - sr2) / math.sqrt(theta)
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return SharpeEquality(z=z, p=p, sharpe_1=sr1, sharpe_2=sr2)


def spearman(a, b) -> float:
    """Rank correlation with average ranks on ties."""
    x = _values(a)
    y = _values(b)
    if len(x) != len(y):
        raise ValueError("series lengths differ")
    if len(x) < 2:
        raise ValueError("need at least two observations")
    rx = rankdata(x)
    ry = rankdata(y)
    if np.all(rx == rx[0]) or np.all(ry == ry[0]):
        raise ValueError("zero rank variance (all values tied)")
    rxd = rx - rx.mean()
    ryd = ry - ry.mean()
    return float(np.dot(rxd, ryd) / math.sqrt(np.dot(rxd, rxd) * np.dot(ryd, ryd)))
