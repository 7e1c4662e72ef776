"""Benchmark construction and the risk-budgeted overlay simulator.

The benchmark is a two-asset mix rebalanced to fixed weights on the first
trading day of each month and left to drift in between. The overlay scales
a long/short spread by a daily active weight theta sized to hit a
tracking-error target: theta_t = min(target / vol, theta_cap), where vol is
the trailing spread volatility over a window ending the day before, and
the target is chosen by the previous day's regime label, optionally capped
by a hard tracking-error ceiling. No decision uses same-day or future
information; the first vol_window.length days are a warm-up with theta 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .regime import Regime, RegimePath
from .rolling import WindowSpec, rolling_vol
from .timeseries import UNIT_RETURN, Series, TradingCalendar

DEFAULT_CAPS: tuple[float, ...] = tuple(np.linspace(0.005, 0.05, 11))


@dataclass(frozen=True)
class OverlayPolicy:
    """Tracking-error targets per regime label, in annualized fraction terms.

    A policy with three equal targets is static: it never consults the
    regime label. te_ceiling, when set, clips every target before sizing.
    """

    target_low: float
    target_neutral: float
    target_high: float
    theta_cap: float = 0.25
    te_ceiling: float | None = None

    def __post_init__(self):
        for name in ("target_low", "target_neutral", "target_high"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.theta_cap <= 0.0:
            raise ValueError("theta_cap must be positive")
        if self.te_ceiling is not None and self.te_ceiling <= 0.0:
            raise ValueError("te_ceiling must be positive when set")

    @classmethod
    def static(cls, target: float = 0.02, theta_cap: float = 0.25,
               te_ceiling: float | None = None) -> "OverlayPolicy":
        return cls(target, target, target, theta_cap, te_ceiling)

    @classmethod
    def dynamic(cls, low: float = 0.005, neutral: float = 0.02,
                high: float = 0.05, theta_cap: float = 0.25,
                te_ceiling: float | None = None) -> "OverlayPolicy":
        return cls(low, neutral, high, theta_cap, te_ceiling)

    @property
    def is_static(self) -> bool:
        return self.target_low == self.target_neutral == self.target_high

    def with_ceiling(self, ceiling: float | None) -> "OverlayPolicy":
        return OverlayPolicy(self.target_low, self.target_neutral,
                             self.target_high, self.theta_cap, ceiling)

    def effective_targets(self) -> tuple[float, float, float]:
        t = (self.target_low, self.target_neutral, self.target_high)
        if self.te_ceiling is None:
            return t
        return tuple(min(x, self.te_ceiling) for x in t)  # type: ignore[return-value]


@dataclass(frozen=True)
class SimResult:
    """Daily simulation output. portfolio - benchmark == theta * spread by
    construction; te is the realized tracking-error path over the active
    period (None for a benchmark-only result)."""

    calendar: TradingCalendar
    portfolio: np.ndarray
    benchmark: np.ndarray
    theta: np.ndarray
    te: Series | None
    policy: OverlayPolicy | None
    first_active: int

    def __post_init__(self):
        n = len(self.calendar)
        for name in ("portfolio", "benchmark", "theta"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if len(arr) != n:
                raise ValueError(f"{name} length must match the calendar")
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def portfolio_series(self) -> Series:
        return Series(self.calendar, self.portfolio, UNIT_RETURN)

    def benchmark_series(self) -> Series:
        return Series(self.calendar, self.benchmark, UNIT_RETURN)


def fixed_mix(eq: Series, bd: Series, w_eq: float = 0.70) -> SimResult:
    """Two-asset portfolio reset to (w_eq, 1 - w_eq) on the first trading
    day of each month; weights drift with relative performance in between."""
    if eq.calendar.dates != bd.calendar.dates:
        raise ValueError("legs are not on the same calendar")
    if eq.unit != UNIT_RETURN or bd.unit != UNIT_RETURN:
        raise ValueError("legs must be return series")
    if not 0.0 <= w_eq <= 1.0:
        raise ValueError("w_eq must be in [0, 1]")
    dates = eq.calendar.dates
    re, rb = eq.values, bd.values
    n = len(dates)
    out = np.empty(n)
    w = w_eq
    prev_month = None
    for t in range(n):
        month = (dates[t].year, dates[t].month)
        if month != prev_month:
            w = w_eq
            prev_month = month
        r = w * re[t] + (1.0 - w) * rb[t]
        out[t] = r
        w = w * (1.0 + re[t]) / (1.0 + r)
    return SimResult(
        calendar=eq.calendar,
        portfolio=out,
        benchmark=out,
        theta=np.zeros(n),
        te=None,
        policy=None,
        first_active=0,
    )


def benchmark_7030(eq: Series, bd: Series) -> SimResult:
    return fixed_mix(eq, bd, 0.70)


def overlay_weight(target_te: float, spread_vol_lagged: float,
                   theta_cap: float = 0.25) -> float:
    """Active weight sized to a tracking-error target given the trailing
    spread vol known the day before. A zero vol estimate pins the weight at
    the cap: the demand target/0 is infinite and the cap binds."""
    if target_te < 0.0 or spread_vol_lagged < 0.0 or theta_cap <= 0.0:
        raise ValueError("target, vol, and cap must be non-negative (cap positive)")
    if spread_vol_lagged == 0.0:
        return theta_cap
    return min(target_te / spread_vol_lagged, theta_cap)


def _decision_labels(regimes: RegimePath, cal: TradingCalendar,
                     start: int, stop: int) -> np.ndarray:
    """Labels at cal[start:stop], verified to line up date-for-date."""
    need = cal.dates[start:stop]
    k0 = regimes.calendar.index(need[0])
    k1 = k0 + len(need)
    if regimes.calendar.dates[k0:k1] != need:
        raise ValueError("regime path is not aligned with the simulation calendar")
    return regimes.labels[k0:k1]


def simulate_overlay(
    benchmark: SimResult,
    spread: Series,
    regimes: RegimePath | None,
    policy: OverlayPolicy,
    vol_window: WindowSpec = WindowSpec(63),
) -> SimResult:
    """Overlay the spread on a benchmark path under a sizing policy.

    Sizing volatility is the full-window trailing spread vol ending one day
    before each decision; a zero estimate sends theta to the cap. A static
    policy ignores `regimes` (None is accepted); a dynamic policy requires
    labels covering every decision date.
    """
    cal = benchmark.calendar
    if spread.calendar.dates != cal.dates:
        raise ValueError("spread is not on the benchmark calendar")
    if spread.unit != UNIT_RETURN:
        raise ValueError("spread must be a return series")
    n = len(cal)
    L = vol_window.length
    if n <= L:
        raise ValueError(f"need more than {L} days for the volatility warm-up")

    # full windows only: the value dated cal[L-1+k] covers returns k..k+L-1
    vol = rolling_vol(spread, WindowSpec(L)).values
    m = n - L  # number of active days

    t_low, t_neutral, t_high = policy.effective_targets()
    if policy.is_static:
        target = np.full(m, t_neutral)
    else:
        if regimes is None:
            raise ValueError("dynamic policy needs a regime path")
        lab = _decision_labels(regimes, cal, L - 1, n - 1)
        target = np.where(
            lab == int(Regime.LOW),
            t_low,
            np.where(lab == int(Regime.HIGH), t_high, t_neutral),
        )

    lagged_vol = vol[:m]
    theta = np.zeros(n)
    with np.errstate(divide="ignore"):
        raw = target / lagged_vol
    theta[L:] = np.where(lagged_vol == 0.0, policy.theta_cap,
                         np.minimum(raw, policy.theta_cap))

    portfolio = benchmark.portfolio + theta * spread.values
    active = Series(cal.suffix(L), theta[L:] * spread.values[L:], UNIT_RETURN)
    te = rolling_vol(active, vol_window) if len(active) >= max(vol_window.min_periods, 2) else None
    return SimResult(
        calendar=cal,
        portfolio=portfolio,
        benchmark=benchmark.portfolio,
        theta=theta,
        te=te,
        policy=policy,
        first_active=L,
    )


def constraint_spectrum(
    benchmark: SimResult,
    spread: Series,
    regimes: RegimePath | None,
    policy: OverlayPolicy,
    caps: Sequence[float] = DEFAULT_CAPS,
    vol_window: WindowSpec = WindowSpec(63),
) -> list[SimResult]:
    """The same overlay run under each tracking-error ceiling in caps."""
    if len(caps) == 0:
        raise ValueError("caps must be non-empty")
    return [
        simulate_overlay(benchmark, spread, regimes,
                         policy.with_ceiling(float(c)), vol_window)
        for c in caps
    ]
