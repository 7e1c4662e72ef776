"""Performance and tracking-error summaries for daily return paths.

Conventions: 252 trading days per year; CAGR compounds the full path and
annualizes by exponent 252/n; volatility is the sample standard deviation
scaled by sqrt(252); Sharpe divides the annualized mean excess return by
the annualized volatility of excess returns. A scalar risk-free rate is an
annual figure and is applied as rf/252 per day. Max drawdown is reported
as a magnitude in [0, 1], measured against a running peak that includes
the starting wealth of 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rolling import WindowSpec, rolling_vol
from .timeseries import TRADING_DAYS_PER_YEAR, UNIT_RETURN, Series


def _returns(x) -> np.ndarray:
    if isinstance(x, Series):
        if x.unit != UNIT_RETURN:
            raise ValueError(f"need a return series, got unit {x.unit!r}")
        v = np.asarray(x.values, dtype=np.float64)
    else:
        v = np.asarray(x, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError("returns must be one-dimensional")
    if len(v) == 0:
        raise ValueError("empty return series")
    if np.any(v <= -1.0) or not np.all(np.isfinite(v)):
        raise ValueError("returns must be finite and > -1")
    return v


def wealth_path(returns) -> np.ndarray:
    """Cumulative wealth including the starting point: [1, ...]."""
    v = _returns(returns)
    out = np.empty(len(v) + 1)
    out[0] = 1.0
    np.cumprod(1.0 + v, out=out[1:])
    return out


def cagr(returns) -> float:
    v = _returns(returns)
    growth = float(np.prod(1.0 + v))
    return growth ** (TRADING_DAYS_PER_YEAR / len(v)) - 1.0


def annualized_vol(returns) -> float:
    v = _returns(returns)
    if len(v) < 2:
        raise ValueError("need at least two returns")
    return float(np.std(v, ddof=1)) * math.sqrt(TRADING_DAYS_PER_YEAR)


def _daily_rf(rf, n: int) -> np.ndarray:
    if isinstance(rf, Series):
        if len(rf) != n:
            raise ValueError("risk-free series length mismatch")
        return np.asarray(rf.values, dtype=np.float64)
    rf_arr = np.asarray(rf, dtype=np.float64)
    if rf_arr.ndim == 0:
        # scalar: annual rate spread evenly across days
        return np.full(n, float(rf_arr) / TRADING_DAYS_PER_YEAR)
    if len(rf_arr) != n:
        raise ValueError("risk-free series length mismatch")
    return rf_arr


def sharpe(returns, rf=0.0) -> float:
    v = _returns(returns)
    if len(v) < 2:
        raise ValueError("need at least two returns")
    ex = v - _daily_rf(rf, len(v))
    sd = float(np.std(ex, ddof=1))
    if sd == 0.0:
        raise ValueError("zero volatility of excess returns")
    return float(np.mean(ex)) * TRADING_DAYS_PER_YEAR / (sd * math.sqrt(TRADING_DAYS_PER_YEAR))


def max_drawdown(returns) -> float:
    """Largest peak-to-trough wealth loss, as a positive fraction."""
    w = wealth_path(returns)
    peak = np.maximum.accumulate(w)
    return float(np.max(1.0 - w / peak))


def realized_te(portfolio: Series, benchmark: Series, w: WindowSpec) -> Series:
    """Annualized trailing volatility of the daily active return."""
    if portfolio.calendar.dates != benchmark.calendar.dates:
        raise ValueError("portfolio and benchmark are not on the same calendar")
    diff = portfolio.values - benchmark.values
    return rolling_vol(Series(portfolio.calendar, diff, UNIT_RETURN), w)


@dataclass(frozen=True)
class TePolicyStats:
    level: float           # mean tracking error
    sigma_te: float        # dispersion of tracking error through time
    cyclicality: float | None  # correlation with the smoothed gauge; None if undefined


def te_policy_stats(te: Series, smoothed_vix: Series) -> TePolicyStats:
    """Level, dispersion, and gauge-correlation of a realized TE path.

    Cyclicality is undefined (None) when either input has zero variance;
    level and sigma are still returned.
    """
    if len(te) < 2:
        raise ValueError("need at least two tracking-error observations")
    g = smoothed_vix.restrict(te.calendar)
    x = te.values
    y = g.values
    level = float(np.mean(x))
    sigma = float(np.std(x, ddof=1))
    xd = x - np.mean(x)
    yd = y - np.mean(y)
    vx = float(np.dot(xd, xd))
    vy = float(np.dot(yd, yd))
    if vx == 0.0 or vy == 0.0:
        return TePolicyStats(level=level, sigma_te=sigma, cyclicality=None)
    cyc = float(np.dot(xd, yd) / math.sqrt(vx * vy))
    return TePolicyStats(level=level, sigma_te=sigma, cyclicality=cyc)


METRICS_CSV_HEADER = (
    "cagr",
    "vol",
    "sharpe",
    "max_drawdown",
    "cagr_over_maxdd",
    "te_level",
    "te_sigma",
    "te_cyclicality",
)


@dataclass(frozen=True)
class MetricsReport:
    cagr: float
    vol: float
    sharpe: float
    max_drawdown: float
    cagr_over_maxdd: float | None
    te_level: float | None = None
    te_sigma: float | None = None
    te_cyclicality: float | None = None

    def to_csv_row(self) -> list[str]:
        row = []
        for name in METRICS_CSV_HEADER:
            v = getattr(self, name)
            row.append("" if v is None else repr(float(v)))
        return row


def summarize(returns, rf=0.0, te: Series | None = None,
              smoothed_vix: Series | None = None) -> MetricsReport:
    """One-row report; TE columns filled when a realized-TE path is given."""
    c = cagr(returns)
    dd = max_drawdown(returns)
    te_level = te_sigma = te_cyc = None
    if te is not None:
        if smoothed_vix is not None:
            ts = te_policy_stats(te, smoothed_vix)
            te_level, te_sigma, te_cyc = ts.level, ts.sigma_te, ts.cyclicality
        else:
            te_level = float(np.mean(te.values))
            te_sigma = float(np.std(te.values, ddof=1)) if len(te) > 1 else None
    return MetricsReport(
        cagr=c,
        vol=annualized_vol(returns),
        sharpe=sharpe(returns, rf),
        max_drawdown=dd,
        cagr_over_maxdd=(c / dd) if dd > 0.0 else None,
        te_level=te_level,
        te_sigma=te_sigma,
        te_cyclicality=te_cyc,
    )
