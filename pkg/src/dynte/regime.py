"""Volatility-regime classification and a two-state Markov-switching check.

The primary signal is a trailing moving average of the implied-volatility
gauge mapped to {Low, Neutral, High} by two fixed thresholds; comparisons
are strict, so a signal sitting exactly on a threshold is Neutral. The
cross-check fits a two-state Gaussian hidden Markov model to weekly returns
by EM: Hamilton's forward filter for the likelihood, the Kim smoother for
state probabilities, Baum-Welch updates for means, variances, transition
matrix, and initial distribution. Exact M-steps keep the log-likelihood
non-decreasing across iterations.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .inference import spearman
from .rolling import WindowSpec, moving_average
from .timeseries import UNIT_LEVEL, UNIT_RETURN, Series, TradingCalendar

_VAR_FLOOR = 1e-12


class Regime(enum.IntEnum):
    LOW = -1
    NEUTRAL = 0
    HIGH = 1


@dataclass(frozen=True)
class RegimeThresholds:
    low: float
    high: float

    def __post_init__(self):
        if not 0.0 < self.low < self.high:
            raise ValueError(
                f"need 0 < low < high, got low={self.low} high={self.high}"
            )


def percentile_thresholds(
    smoothed: Series, p_low: float = 0.16, p_high: float = 0.76
) -> RegimeThresholds:
    """Thresholds at two linear-interpolation percentiles of the smoothed
    signal's sample distribution."""
    if not 0.0 < p_low < p_high < 1.0:
        raise ValueError("need 0 < p_low < p_high < 1")
    lo, hi = np.quantile(smoothed.values, [p_low, p_high])
    return RegimeThresholds(low=float(lo), high=float(hi))


@dataclass(frozen=True)
class RegimePath:
    """Per-date label plus the smoothed signal that produced it."""

    calendar: TradingCalendar
    labels: np.ndarray
    signal: np.ndarray
    thresholds: RegimeThresholds

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int8)
        signal = np.asarray(self.signal, dtype=np.float64)
        if len(labels) != len(self.calendar) or len(signal) != len(self.calendar):
            raise ValueError("labels/signal length must match the calendar")
        expect = np.where(
            signal < self.thresholds.low,
            int(Regime.LOW),
            np.where(signal > self.thresholds.high, int(Regime.HIGH), int(Regime.NEUTRAL)),
        ).astype(np.int8)
        if not np.array_equal(labels, expect):
            raise ValueError("labels inconsistent with signal and thresholds")
        labels.setflags(write=False)
        signal.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "signal", signal)

    def label_at(self, d) -> Regime:
        return Regime(int(self.labels[self.calendar.index(d)]))

    def fractions(self) -> dict[Regime, float]:
        n = len(self.labels)
        return {r: float(np.mean(self.labels == int(r))) for r in Regime}


def classify(
    vix: Series, w: WindowSpec, thresholds: RegimeThresholds
) -> RegimePath:
    """Label each date from the trailing moving average of the gauge."""
    sig = moving_average(vix, w)
    labels = np.where(
        sig.values < thresholds.low,
        int(Regime.LOW),
        np.where(sig.values > thresholds.high, int(Regime.HIGH), int(Regime.NEUTRAL)),
    ).astype(np.int8)
    return RegimePath(sig.calendar, labels, sig.values, thresholds)


def weekly_returns(daily: Series) -> Series:
    """Compound daily simple returns within each ISO week; each value is
    dated at the week's last trading day. Partial edge weeks are kept."""
    if daily.unit != UNIT_RETURN:
        raise ValueError(f"need a return series, got unit {daily.unit!r}")
    dates = daily.calendar.dates
    vals = daily.values
    out_dates = []
    out_vals = []
    growth = 1.0
    cur = dates[0].isocalendar()[:2]
    for i, d in enumerate(dates):
        key = d.isocalendar()[:2]
        if key != cur:
            out_dates.append(dates[i - 1])
            out_vals.append(growth - 1.0)
            growth = 1.0
            cur = key
        growth *= 1.0 + vals[i]
    out_dates.append(dates[-1])
    out_vals.append(growth - 1.0)
    return Series(TradingCalendar(tuple(out_dates)), np.asarray(out_vals), UNIT_RETURN)


def stationary_distribution(P: np.ndarray) -> tuple[float, float]:
    """Stationary distribution of a 2x2 row-stochastic matrix; uniform when
    the chain never leaves its start state (identity matrix)."""
    a, b = float(P[0, 1]), float(P[1, 0])
    if a + b == 0.0:
        return (0.5, 0.5)
    return (b / (a + b), a / (a + b))


@dataclass(frozen=True)
class MSModel:
    """Two-state Gaussian HMM; state 0 is low-variance, state 1 high."""

    mu: tuple[float, float]
    var: tuple[float, float]
    transition: np.ndarray
    initial: tuple[float, float]
    loglik: float
    trace: tuple[float, ...]
    converged: bool
    n_iter: int

    def __post_init__(self):
        P = np.asarray(self.transition, dtype=np.float64)
        if P.shape != (2, 2) or np.any(P < -1e-12) or np.any(
            np.abs(P.sum(axis=1) - 1.0) > 1e-9
        ):
            raise ValueError("transition must be 2x2 row-stochastic")
        if self.var[1] < self.var[0]:
            raise ValueError("states must be ordered by variance (low first)")
        if min(self.var) <= 0.0:
            raise ValueError("variances must be positive")
        P = P.copy()
        P.setflags(write=False)
        object.__setattr__(self, "transition", P)


class _Collapse(Exception):
    """A trial hit a degenerate variance or zero likelihood."""


def _filter_smoother(y, mu, var, P, pi):
    """Hamilton filter + Kim smoother for two states.

    Returns (loglik, filt[T,2], smooth[T,2], pair[T-1,2,2]) where pair[t] is
    the smoothed probability of (s_t = i, s_{t+1} = j).
    """
    T = len(y)
    filt = np.empty((T, 2))
    pred = np.empty((T, 2))
    c0 = 1.0 / math.sqrt(2.0 * math.pi * var[0])
    c1 = 1.0 / math.sqrt(2.0 * math.pi * var[1])
    inv0 = 0.5 / var[0]
    inv1 = 0.5 / var[1]
    p00, p01 = P[0, 0], P[0, 1]
    p10, p11 = P[1, 0], P[1, 1]

    pr0, pr1 = pi[0], pi[1]
    ll = 0.0
    for t in range(T):
        pred[t, 0] = pr0
        pred[t, 1] = pr1
        d0 = y[t] - mu[0]
        d1 = y[t] - mu[1]
        e0 = c0 * math.exp(-d0 * d0 * inv0)
        e1 = c1 * math.exp(-d1 * d1 * inv1)
        j0 = e0 * pr0
        j1 = e1 * pr1
        lik = j0 + j1
        if not lik > 0.0 or not math.isfinite(lik):
            raise _Collapse
        f0 = j0 / lik
        f1 = j1 / lik
        filt[t, 0] = f0
        filt[t, 1] = f1
        ll += math.log(lik)
        pr0 = f0 * p00 + f1 * p10
        pr1 = f0 * p01 + f1 * p11

    smooth = np.empty((T, 2))
    pair = np.empty((T - 1, 2, 2))
    smooth[T - 1] = filt[T - 1]
    for t in range(T - 2, -1, -1):
        r0 = smooth[t + 1, 0] / pred[t + 1, 0] if pred[t + 1, 0] > 0.0 else 0.0
        r1 = smooth[t + 1, 1] / pred[t + 1, 1] if pred[t + 1, 1] > 0.0 else 0.0
        f0, f1 = filt[t, 0], filt[t, 1]
        pair[t, 0, 0] = f0 * p00 * r0
        pair[t, 0, 1] = f0 * p01 * r1
        pair[t, 1, 0] = f1 * p10 * r0
        pair[t, 1, 1] = f1 * p11 * r1
        smooth[t, 0] = pair[t, 0, 0] + pair[t, 0, 1]
        smooth[t, 1] = pair[t, 1, 0] + pair[t, 1, 1]
    return ll, filt, smooth, pair


def _em_trial(y, mu, var, P, pi, tol, max_iter):
    trace = []
    prev = -np.inf
    converged = False
    fitted = (mu, var, P, pi)
    for it in range(max_iter):
        if min(var) < _VAR_FLOOR:
            raise _Collapse
        ll, _filt, smooth, pair = _filter_smoother(y, mu, var, P, pi)
        trace.append(ll)
        # parameters that produced trace[-1]; the M-step below is only kept
        # if a later iteration evaluates it
        fitted = (mu, var, P, pi)
        if it > 0 and ll - prev < tol:
            converged = True
            break
        prev = ll

        w0 = smooth[:, 0].sum()
        w1 = smooth[:, 1].sum()
        if w0 <= 0.0 or w1 <= 0.0:
            raise _Collapse
        mu = (
            float(np.dot(smooth[:, 0], y) / w0),
            float(np.dot(smooth[:, 1], y) / w1),
        )
        var = (
            float(np.dot(smooth[:, 0], (y - mu[0]) ** 2) / w0),
            float(np.dot(smooth[:, 1], (y - mu[1]) ** 2) / w1),
        )
        denom = smooth[:-1].sum(axis=0)
        if np.any(denom <= 0.0):
            raise _Collapse
        num = pair.sum(axis=0)
        P = num / denom[:, None]
        P = P / P.sum(axis=1, keepdims=True)
        pi = (float(smooth[0, 0]), float(smooth[0, 1]))
    mu, var, P, pi = fitted
    return mu, var, P, pi, trace, converged


def fit_markov_switching(
    weekly: Series,
    restarts: int = 20,
    tol: float = 1e-8,
    max_iter: int = 1000,
    seed: int = 0,
) -> MSModel:
    """Best-of-restarts EM fit. Trials that collapse to a degenerate
    variance are discarded and redrawn; the best surviving trial by final
    log-likelihood wins. converged is False if that trial hit max_iter."""
    if weekly.unit != UNIT_RETURN:
        raise ValueError(f"need a return series, got unit {weekly.unit!r}")
    y = np.asarray(weekly.values, dtype=np.float64)
    if len(y) < 4:
        raise ValueError("need at least four observations")
    m0 = float(np.mean(y))
    v0 = float(np.var(y))
    if v0 == 0.0:
        raise ValueError("constant input; variance cannot be attributed to states")

    rng = np.random.default_rng(seed)
    best = None
    done = 0
    attempts = 0
    while done < restarts and attempts < 5 * restarts:
        attempts += 1
        sd = math.sqrt(v0)
        mu = (m0 + 0.5 * sd * rng.standard_normal(), m0 + 0.5 * sd * rng.standard_normal())
        var = (v0 * rng.uniform(0.2, 1.0), v0 * rng.uniform(1.0, 5.0))
        stay0 = rng.uniform(0.85, 0.99)
        stay1 = rng.uniform(0.85, 0.99)
        P = np.array([[stay0, 1.0 - stay0], [1.0 - stay1, stay1]])
        pi = (0.5, 0.5)
        try:
            out = _em_trial(y, mu, var, P, pi, tol, max_iter)
        except _Collapse:
            continue
        done += 1
        if best is None or out[4][-1] > best[4][-1]:
            best = out
    if best is None:
        raise ValueError("all EM restarts collapsed; no usable fit")

    mu, var, P, pi, trace, converged = best
    if var[1] < var[0]:
        mu = (mu[1], mu[0])
        var = (var[1], var[0])
        pi = (pi[1], pi[0])
        P = P[::-1, ::-1].copy()
    return MSModel(
        mu=mu,
        var=var,
        transition=P,
        initial=pi,
        loglik=trace[-1],
        trace=tuple(trace),
        converged=converged,
        n_iter=len(trace),
    )


def model_from_params(mu, var, transition, initial=None) -> MSModel:
    """MSModel from explicit parameters; initial defaults to the stationary
    distribution of the transition matrix."""
    P = np.asarray(transition, dtype=np.float64)
    pi = stationary_distribution(P) if initial is None else tuple(initial)
    return MSModel(
        mu=tuple(mu),
        var=tuple(var),
        transition=P,
        initial=pi,  # type: ignore[arg-type]
        loglik=float("nan"),
        trace=(),
        converged=True,
        n_iter=0,
    )


def smoothed_high_prob(model: MSModel, weekly: Series) -> Series:
    """Smoothed probability of the high-variance state at each weekly date."""
    if weekly.unit != UNIT_RETURN:
        raise ValueError(f"need a return series, got unit {weekly.unit!r}")
    _ll, _filt, smooth, _pair = _filter_smoother(
        np.asarray(weekly.values),
        model.mu,
        model.var,
        np.asarray(model.transition),
        model.initial,
    )
    # backward recursion can overshoot 1 by a few ulp
    return Series(weekly.calendar, np.clip(smooth[:, 1], 0.0, 1.0), UNIT_LEVEL)


@dataclass(frozen=True)
class AgreementReport:
    spearman: float
    concordance: float


def signal_agreement(path: RegimePath, ms_prob: Series) -> AgreementReport:
    """Rank correlation between the smoothed gauge and the model's
    high-state probability at weekly dates, plus the share of weeks where
    High-label and probability > 0.5 agree."""
    sig = []
    hi = []
    for d in ms_prob.calendar.dates:
        i = path.calendar.index(d)
        sig.append(path.signal[i])
        hi.append(path.labels[i] == int(Regime.HIGH))
    rho = spearman(np.asarray(sig), ms_prob.values)
    agree = np.asarray(hi) == (ms_prob.values > 0.5)
    return AgreementReport(spearman=rho, concordance=float(np.mean(agree)))
