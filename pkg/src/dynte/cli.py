"""Command-line entry point.

Subcommands: synth, exhibit N (1..7), converge, omega, regret, sweep,
props. Settings come from a versioned JSON config; flags override config
fields. Outputs are CSV tables named {name}_{hash}.csv where the hash is
derived from the effective config and command, never from the clock, so a
re-run with the same config writes byte-identical CSVs to the same paths.
Optional SVG charts accompany time-series tables. Exit codes: 0 success,
2 bad flags or config, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import hashlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .events import (
    RegretEntry,
    find_trough,
    omega_table,
    regret_table,
    window_sweep,
)
from .inference import BootstrapSpec, circular_block_bootstrap
from .metrics import METRICS_CSV_HEADER, summarize, wealth_path
from .model import GovernanceParams, RegimeParams, proposition_suite
from .regime import RegimePath, RegimeThresholds, classify
from .rolling import (
    WindowSpec,
    moving_average,
    rolling_avg_pairwise_corr,
    rolling_corr,
)
from .simulate import (
    DEFAULT_CAPS,
    OverlayPolicy,
    SimResult,
    benchmark_7030,
    simulate_overlay,
)
from .timeseries import (
    UNIT_LEVEL,
    UNIT_PRICE,
    AssetPanel,
    Series,
    SynthParams,
    ingest_csv,
    intersect_calendars,
    prices_from_returns,
    returns_from_prices,
    synth_regime_panel,
)

CONFIG_VERSION = 1


class ConfigError(Exception):
    """Invalid config or flags; reported with the offending field."""

    def __init__(self, fieldname: str, msg: str):
        super().__init__(f"{fieldname}: {msg}")
        self.field = fieldname


_ROLE_KEYS = ("eq", "bd", "vix", "tlt", "rf", "spread", "sectors")

_DEFAULTS: dict[str, Any] = {
    "version": CONFIG_VERSION,
    "seed": 0,
    "out": "out",
    "svg": True,
    "data": {},
    "range": {"start": None, "end": None},
    "windows": {
        "signal": 21,
        "vol": 63,
        "pairwise_corr": 63,
        "stock_bond_corr": 126,
        "vol_surprise": 42,
    },
    "thresholds": {"low": 13.0, "high": 22.0},
    "percentiles": {"low": 0.16, "high": 0.76},
    "policy": {
        "low": 0.005,
        "neutral": 0.02,
        "high": 0.05,
        "static": 0.02,
        "theta_cap": 0.25,
    },
    "caps": [float(c) for c in DEFAULT_CAPS],
    "omega_horizons": [21, 42, 63, 126, 252],
    "regret_horizons": [63, 126, 252],
    "sweep_windows": [1, 5, 21, 63],
    "crises": {
        "gfc": ["2007-10-01", "2009-06-30"],
        "covid": ["2020-01-01", "2020-06-30"],
        "tightening_2022": ["2022-01-01", "2022-12-31"],
    },
    "bootstrap": {"block": 63, "iterations": 10000, "seed": 0, "confidence": 0.95},
    "synth": {},
    "model": {"alpha": [0.02, 0.10], "sigma": [0.10, 0.25], "p": 0.3, "tau_bar": 0.05},
}


def _require(d: dict, fieldname: str, kind, path: str):
    v = d.get(fieldname)
    if not isinstance(v, kind):
        raise ConfigError(f"{path}{fieldname}", f"expected {kind.__name__}")
    return v


def _merge_defaults(user: dict, defaults: dict, path: str = "") -> dict:
    out = dict(defaults)
    for k, v in user.items():
        if k not in defaults:
            raise ConfigError(f"{path}{k}", "unknown config key")
        if isinstance(defaults[k], dict) and not k.startswith(("data", "synth", "crises")):
            if not isinstance(v, dict):
                raise ConfigError(f"{path}{k}", "expected an object")
            out[k] = _merge_defaults(v, defaults[k], f"{path}{k}.")
        else:
            out[k] = v
    return out


@dataclass(frozen=True)
class RunConfig:
    """Validated, fully-resolved settings; `raw` is the canonical dict the
    output hash is computed from."""

    raw: dict

    @property
    def seed(self) -> int:
        return self.raw["seed"]

    @property
    def out_dir(self) -> Path:
        return Path(self.raw["out"])

    @property
    def svg(self) -> bool:
        return bool(self.raw["svg"])

    def window(self, name: str) -> WindowSpec:
        return WindowSpec(int(self.raw["windows"][name]))

    @property
    def thresholds(self) -> RegimeThresholds:
        t = self.raw["thresholds"]
        return RegimeThresholds(low=float(t["low"]), high=float(t["high"]))

    @property
    def dynamic_policy(self) -> OverlayPolicy:
        p = self.raw["policy"]
        return OverlayPolicy.dynamic(
            low=float(p["low"]), neutral=float(p["neutral"]),
            high=float(p["high"]), theta_cap=float(p["theta_cap"]),
        )

    @property
    def static_policy(self) -> OverlayPolicy:
        p = self.raw["policy"]
        return OverlayPolicy.static(
            target=float(p["static"]), theta_cap=float(p["theta_cap"]),
        )

    @property
    def caps(self) -> list[float | None]:
        return [None if c is None else float(c) for c in self.raw["caps"]]

    @property
    def bootstrap_spec(self) -> BootstrapSpec:
        b = self.raw["bootstrap"]
        return BootstrapSpec(
            block=int(b["block"]), iterations=int(b["iterations"]),
            seed=int(b["seed"]), confidence=float(b["confidence"]),
        )

    @property
    def synth_params(self) -> SynthParams:
        s = dict(self.raw["synth"])
        s.setdefault("seed", self.seed)
        if "start_date" in s:
            s["start_date"] = dt.date.fromisoformat(s["start_date"])
        for k in ("transition", "alpha", "sigma", "eq_drift", "eq_vol",
                  "bd_drift", "bd_vol", "vix_mean"):
            if k in s:
                s[k] = tuple(tuple(r) for r in s[k]) if k == "transition" else tuple(s[k])
        try:
            return SynthParams(**s)
        except (TypeError, ValueError) as e:
            raise ConfigError("synth", str(e)) from None

    @property
    def model_params(self) -> tuple[RegimeParams, GovernanceParams]:
        m = self.raw["model"]
        try:
            rp = RegimeParams(
                alpha=tuple(m["alpha"]), sigma=tuple(m["sigma"]), p=float(m["p"])
            )
            gov = GovernanceParams(tau_bar=float(m["tau_bar"]))
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError("model", str(e)) from None
        return rp, gov

    def date_range(self) -> tuple[dt.date | None, dt.date | None]:
        r = self.raw["range"]
        out = []
        for k in ("start", "end"):
            v = r.get(k)
            if v is None:
                out.append(None)
            else:
                try:
                    out.append(dt.date.fromisoformat(v))
                except ValueError:
                    raise ConfigError(f"range.{k}", f"bad ISO date {v!r}") from None
        return out[0], out[1]

    def role(self, name: str, required_by: str):
        d = self.raw["data"].get(name)
        if d is None:
            raise ConfigError(f"data.{name}", f"required for {required_by}")
        if not isinstance(d, dict) or "path" not in d:
            raise ConfigError(f"data.{name}", "expected {path, column|columns}")
        return d


def load_config(path: str | None, overrides: dict[str, Any]) -> RunConfig:
    user: dict = {}
    if path is not None:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except FileNotFoundError:
            raise ConfigError("config", f"file not found: {path}") from None
        except json.JSONDecodeError as e:
            raise ConfigError("config", f"invalid JSON: {e}") from None
        if not isinstance(user, dict):
            raise ConfigError("config", "top level must be an object")
        if user.get("version", CONFIG_VERSION) != CONFIG_VERSION:
            raise ConfigError("version", f"unsupported version {user.get('version')!r}")

    raw = _merge_defaults(user, _DEFAULTS)

    if overrides.get("out") is not None:
        raw["out"] = overrides["out"]
    if overrides.get("seed") is not None:
        raw["seed"] = overrides["seed"]
        raw["bootstrap"] = dict(raw["bootstrap"], seed=overrides["seed"])
        raw["synth"] = dict(raw["synth"], seed=overrides["seed"])
    if overrides.get("caps") is not None:
        raw["caps"] = overrides["caps"]
    if overrides.get("windows") is not None:
        raw["sweep_windows"] = overrides["windows"]
    if overrides.get("horizons") is not None:
        raw["omega_horizons"] = overrides["horizons"]
        raw["regret_horizons"] = overrides["horizons"]

    _require(raw, "seed", int, "")
    _require(raw, "out", str, "")
    for name, kind in (("caps", list), ("omega_horizons", list),
                       ("regret_horizons", list), ("sweep_windows", list)):
        v = _require(raw, name, list, "")
        if len(v) == 0:
            raise ConfigError(name, "must be non-empty")
    for k, v in raw["data"].items():
        if k not in _ROLE_KEYS:
            raise ConfigError(f"data.{k}", f"unknown role; expected one of {_ROLE_KEYS}")
    th = raw["thresholds"]
    if not (isinstance(th.get("low"), (int, float)) and isinstance(th.get("high"), (int, float))):
        raise ConfigError("thresholds", "low and high must be numbers")
    if not th["low"] < th["high"]:
        raise ConfigError("thresholds", "low must be below high")
    return RunConfig(raw=raw)


# ---------------------------------------------------------------- output --

def _cfg_hash(cfg: RunConfig, token: str) -> str:
    blob = json.dumps({"cmd": token, "cfg": cfg.raw}, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _write_csv(cfg: RunConfig, stem: str, token: str, rows: list[list[str]]) -> Path:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.out_dir / f"{stem}_{_cfg_hash(cfg, token)}.csv"
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)
    return path


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def _maybe_svg(cfg: RunConfig, stem: str, token: str, dates, named_series: dict,
               ylabel: str) -> Path | None:
    if not cfg.svg:
        return None
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return None
    fig, ax = plt.subplots(figsize=(9, 4.5))
    for name, vals in named_series.items():
        ax.plot(dates, vals, label=name, linewidth=1.0)
    ax.set_ylabel(ylabel)
    ax.legend(loc="best", fontsize=8)
    fig.autofmt_xdate()
    path = cfg.out_dir / f"{stem}_{_cfg_hash(cfg, token)}.svg"
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


# ----------------------------------------------------------- data loading --

@dataclass
class Market:
    """Everything the exhibit pipeline needs, aligned to one calendar of
    daily returns (prices keep one extra leading date). Roles a command did
    not ask for stay None."""

    vix: Series            # level, on the return calendar
    vix_full: Series       # level, on the price calendar
    eq_prices: Series | None = None
    eq: Series | None = None
    bd: Series | None = None
    spread: Series | None = None
    rf: Series | float = 0.0
    tlt: Series | None = None
    sectors: AssetPanel | None = None


def _load_series(role: dict, fieldname: str, unit: str) -> Series:
    col = role.get("column")
    if not isinstance(col, str):
        raise ConfigError(f"data.{fieldname}.column", "expected a column name")
    try:
        res = ingest_csv(role["path"], columns=[col], unit=unit)
    except FileNotFoundError:
        raise ConfigError(f"data.{fieldname}.path",
                          f"file not found: {role['path']}") from None
    return res.panel[col]


def _load_sectors(role: dict) -> AssetPanel:
    cols = role.get("columns")
    res = ingest_csv(role["path"], columns=cols, unit=UNIT_PRICE)
    if len(res.panel.symbols) < 2:
        raise ConfigError("data.sectors", "need at least two sector columns")
    return res.panel


def load_market(cfg: RunConfig, command: str,
                need: Sequence[str] = ("eq", "bd", "vix")) -> Market:
    roles: dict[str, Series | AssetPanel] = {}
    for name in need:
        spec = cfg.role(name, command)
        if name == "sectors":
            roles[name] = _load_sectors(spec)
        else:
            unit = UNIT_LEVEL if name in ("vix", "rf") else UNIT_PRICE
            roles[name] = _load_series(spec, name, unit)
    for name in ("tlt", "spread", "sectors"):
        if name not in roles and cfg.raw["data"].get(name) is not None:
            spec = cfg.role(name, command)
            roles[name] = _load_sectors(spec) if name == "sectors" else \
                _load_series(spec, name, UNIT_PRICE)
    if "rf" not in roles and cfg.raw["data"].get("rf") is not None:
        roles["rf"] = _load_series(cfg.role("rf", command), "rf", UNIT_LEVEL)

    if "vix" not in roles:
        raise ConfigError("data.vix", f"required for {command}")

    cal = intersect_calendars([v.calendar for v in roles.values()])
    start, end = cfg.date_range()
    cal = cal.window(start, end)
    if len(cal) < 3:
        raise ValueError("fewer than three shared dates after alignment")
    rcal = cal.suffix(1)

    def rets(name: str) -> Series | None:
        if name not in roles:
            return None
        return returns_from_prices(roles[name].restrict(cal))

    eq_p = roles["eq"].restrict(cal) if "eq" in roles else None
    eq = returns_from_prices(eq_p) if eq_p is not None else None
    bd = rets("bd")

    spread = rets("spread")
    if spread is None and eq is not None and bd is not None:
        spread = Series(rcal, eq.values - bd.values, eq.unit)

    vix_full = roles["vix"].restrict(cal)

    rf: Series | float = 0.0
    if "rf" in roles:
        annual = roles["rf"].restrict(rcal)
        rf = Series(rcal, annual.values / 252.0, UNIT_LEVEL)

    sectors = None
    if "sectors" in roles:
        panel: AssetPanel = roles["sectors"]  # type: ignore[assignment]
        sectors = AssetPanel(
            rcal,
            {sym: returns_from_prices(panel[sym].restrict(cal))
             for sym in panel.symbols},
        )

    return Market(
        vix=vix_full.restrict(rcal),
        vix_full=vix_full,
        eq_prices=eq_p,
        eq=eq,
        bd=bd,
        spread=spread,
        rf=rf,
        tlt=rets("tlt"),
        sectors=sectors,
    )


def synthetic_market(cfg: RunConfig) -> Market:
    """In-memory synthetic equivalent of load_market, for data-free runs."""
    panel, _states = synth_regime_panel(cfg.synth_params)
    eq = panel["BENCH_EQ"]
    eq_p = prices_from_returns(eq)
    return Market(
        eq_prices=eq_p,
        eq=eq,
        bd=panel["BENCH_BD"],
        spread=panel["SPREAD"],
        vix=panel["VIX"],
        vix_full=panel["VIX"],
        rf=0.0,
        tlt=None,
        sectors=None,
    )


def _market_or_synth(cfg: RunConfig, command: str,
                     need: Sequence[str] = ("eq", "bd", "vix")) -> Market:
    if all(cfg.raw["data"].get(r) is not None for r in need):
        return load_market(cfg, command, need)
    if any(cfg.raw["data"].get(r) is not None for r in need):
        missing = [r for r in need if cfg.raw["data"].get(r) is None]
        raise ConfigError(f"data.{missing[0]}", f"required for {command}")
    return synthetic_market(cfg)


@dataclass
class Engine:
    market: Market
    bench: SimResult
    static: SimResult
    dynamic: SimResult
    path: RegimePath
    smoothed_vix: Series


def build_engine(cfg: RunConfig, market: Market) -> Engine:
    if market.eq is None or market.bd is None or market.spread is None:
        raise ValueError("benchmark legs are missing")
    bench = benchmark_7030(market.eq, market.bd)
    path = classify(market.vix, cfg.window("signal"), cfg.thresholds)
    vol_w = cfg.window("vol")
    static = simulate_overlay(bench, market.spread, None, cfg.static_policy, vol_w)
    dynamic = simulate_overlay(bench, market.spread, path, cfg.dynamic_policy, vol_w)
    sm = moving_average(market.vix, cfg.window("signal"))
    return Engine(market=market, bench=bench, static=static, dynamic=dynamic,
                  path=path, smoothed_vix=sm)


# -------------------------------------------------------------- commands --

def cmd_synth(cfg: RunConfig) -> list[Path]:
    """Write the synthetic panel as index levels plus the true state path."""
    panel, states = synth_regime_panel(cfg.synth_params)
    cal = panel.calendar
    levels = {
        sym: prices_from_returns(panel[sym]).values
        for sym in ("BENCH_EQ", "BENCH_BD", "SPREAD")
    }
    rows = [["date", "BENCH_EQ", "BENCH_BD", "SPREAD", "VIX"]]
    vix = panel["VIX"].values
    for i, d in enumerate(cal.dates):
        rows.append([d.isoformat()] + [_fmt(levels[s][i]) for s in
                     ("BENCH_EQ", "BENCH_BD", "SPREAD")] + [_fmt(vix[i])])
    p1 = _write_csv(cfg, "synth_panel", "synth", rows)
    rows = [["date", "state"]]
    for i, d in enumerate(cal.dates):
        rows.append([d.isoformat(), str(int(states[i]))])
    p2 = _write_csv(cfg, "synth_states", "synth", rows)
    return [p1, p2]


def _exhibit1(cfg: RunConfig) -> list[Path]:
    market = load_market(cfg, "exhibit 1", need=("sectors", "vix"))
    if market.sectors is None:
        raise ConfigError("data.sectors", "required for exhibit 1")
    w = cfg.window("pairwise_corr")
    avg = rolling_avg_pairwise_corr(market.sectors, w)
    vix = market.vix_full.restrict(avg.calendar)
    rows = [["date", "avg_pairwise_corr", "vix"]]
    for i, d in enumerate(avg.calendar.dates):
        rows.append([d.isoformat(), _fmt(avg.values[i]), _fmt(vix.values[i])])
    out = [_write_csv(cfg, "exhibit1", "exhibit1", rows)]
    svg = _maybe_svg(cfg, "exhibit1", "exhibit1", avg.calendar.dates,
                     {"avg pairwise corr": avg.values}, "correlation")
    if svg:
        out.append(svg)
    return out


def _exhibit2(cfg: RunConfig) -> list[Path]:
    market = load_market(cfg, "exhibit 2", need=("eq", "bd", "vix"))
    w = cfg.window("stock_bond_corr")
    c_bd = rolling_corr(market.eq, market.bd, w)
    named = {"eq_bd": c_bd.values}
    header = ["date", "corr_eq_bd"]
    cols = [c_bd.values]
    if market.tlt is not None:
        c_tlt = rolling_corr(market.eq, market.tlt, w)
        named["eq_tlt"] = c_tlt.values
        header.append("corr_eq_tlt")
        cols.append(c_tlt.values)
    rows = [header]
    for i, d in enumerate(c_bd.calendar.dates):
        rows.append([d.isoformat()] + [_fmt(c[i]) for c in cols])
    out = [_write_csv(cfg, "exhibit2", "exhibit2", rows)]
    svg = _maybe_svg(cfg, "exhibit2", "exhibit2", c_bd.calendar.dates, named,
                     "correlation")
    if svg:
        out.append(svg)
    return out


def _exhibit3(cfg: RunConfig) -> list[Path]:
    eng = build_engine(cfg, _market_or_synth(cfg, "exhibit 3"))
    rows = [["portfolio"] + list(METRICS_CSV_HEADER)]
    for name, sim in (("benchmark", eng.bench), ("static", eng.static),
                      ("dynamic", eng.dynamic)):
        rep = summarize(sim.portfolio, rf=eng.market.rf, te=sim.te,
                        smoothed_vix=eng.smoothed_vix)
        row = rep.to_csv_row()
        # display convention: drawdowns are losses, shown negative
        row[3] = _fmt(-rep.max_drawdown)
        rows.append([name] + row)
    return [_write_csv(cfg, "exhibit3", "exhibit3", rows)]


def _exhibit4(cfg: RunConfig) -> list[Path]:
    eng = build_engine(cfg, _market_or_synth(cfg, "exhibit 4"))
    te_s, te_d = eng.static.te, eng.dynamic.te
    assert te_s is not None and te_d is not None
    sm = eng.smoothed_vix.restrict(te_s.calendar)
    rows = [["date", "te_static", "te_dynamic", "smoothed_vix"]]
    for i, d in enumerate(te_s.calendar.dates):
        rows.append([d.isoformat(), _fmt(te_s.values[i]), _fmt(te_d.values[i]),
                     _fmt(sm.values[i])])
    out = [_write_csv(cfg, "exhibit4", "exhibit4", rows)]
    svg = _maybe_svg(cfg, "exhibit4", "exhibit4", te_s.calendar.dates,
                     {"static": te_s.values, "dynamic": te_d.values},
                     "realized tracking error")
    if svg:
        out.append(svg)
    return out


def cmd_omega(cfg: RunConfig) -> list[Path]:
    market = _market_or_synth(cfg, "omega", need=("eq", "vix"))
    vix = market.vix_full
    prices = market.eq_prices.restrict(vix.calendar) if \
        len(vix) != len(market.eq_prices) else market.eq_prices
    horizons = [int(h) for h in cfg.raw["omega_horizons"]]
    rep = omega_table(vix, prices, horizons)
    return [_write_csv(cfg, "exhibit5", "omega", rep.to_csv_rows())]


def cmd_regret(cfg: RunConfig) -> list[Path]:
    market = _market_or_synth(cfg, "regret")
    bench = benchmark_7030(market.eq, market.bd)
    troughs = []
    for name, span in cfg.raw["crises"].items():
        try:
            w = (dt.date.fromisoformat(span[0]), dt.date.fromisoformat(span[1]))
        except (ValueError, IndexError, TypeError):
            raise ConfigError(f"crises.{name}", "expected [start, end] ISO dates") from None
        troughs.append((name, find_trough(bench, w, market.vix)))
    horizons = [int(h) for h in cfg.raw["regret_horizons"]]
    entries = regret_table(market.eq, market.bd, troughs, horizons)
    rows = [list(RegretEntry.CSV_HEADER)]
    for e in entries:
        rows.extend(e.to_csv_rows())
    return [_write_csv(cfg, "exhibit6b", "regret", rows)]


def _exhibit6(cfg: RunConfig) -> list[Path]:
    market = _market_or_synth(cfg, "exhibit 6")
    bench = benchmark_7030(market.eq, market.bd)
    w = wealth_path(bench.portfolio)
    peak = np.maximum.accumulate(w)
    dd = 1.0 - w[1:] / peak[1:]
    rows = [["date", "drawdown", "vix"]]
    for i, d in enumerate(bench.calendar.dates):
        rows.append([d.isoformat(), _fmt(dd[i]), _fmt(market.vix.values[i])])
    out = [_write_csv(cfg, "exhibit6a", "exhibit6", rows)]
    svg = _maybe_svg(cfg, "exhibit6a", "exhibit6", bench.calendar.dates,
                     {"drawdown": dd}, "drawdown from peak")
    if svg:
        out.append(svg)
    out.extend(cmd_regret(cfg))
    return out


def cmd_converge(cfg: RunConfig) -> list[Path]:
    eng = build_engine(cfg, _market_or_synth(cfg, "converge"))
    market = eng.market
    path = eng.path
    vol_w = cfg.window("vol")
    bspec = cfg.bootstrap_spec
    header = ["cap", "cagr", "vol", "sharpe", "max_drawdown", "te_level",
              "te_sigma", "sharpe_ci_lo", "sharpe_ci_hi", "ci_width"]
    rows = [header]
    for cap in cfg.caps:
        pol = cfg.dynamic_policy.with_ceiling(cap)
        sim = simulate_overlay(eng.bench, market.spread, path, pol, vol_w)
        rep = summarize(sim.portfolio, rf=market.rf, te=sim.te,
                        smoothed_vix=eng.smoothed_vix)
        boot = circular_block_bootstrap(sim.portfolio, bspec, "sharpe")
        rows.append([
            "uncapped" if cap is None else _fmt(cap),
            _fmt(rep.cagr), _fmt(rep.vol), _fmt(rep.sharpe),
            _fmt(rep.max_drawdown), _fmt(rep.te_level), _fmt(rep.te_sigma),
            _fmt(boot.ci_lo), _fmt(boot.ci_hi), _fmt(boot.width),
        ])
    return [_write_csv(cfg, "exhibit7", "converge", rows)]


def cmd_sweep(cfg: RunConfig) -> list[Path]:
    market = _market_or_synth(cfg, "sweep")
    pct = cfg.raw["percentiles"]
    rep = window_sweep(
        market.vix, market.eq, market.bd, market.spread,
        windows=[int(w) for w in cfg.raw["sweep_windows"]],
        percentiles=(float(pct["low"]), float(pct["high"])),
        dynamic=cfg.dynamic_policy,
        static=cfg.static_policy,
        vol_window=cfg.window("vol"),
        rf=market.rf,
    )
    return [_write_csv(cfg, "sweep", "sweep", rep.to_csv_rows())]


def cmd_props(cfg: RunConfig) -> list[Path]:
    rp, gov = cfg.model_params
    rep = proposition_suite(rp, gov)
    return [_write_csv(cfg, "props", "props", rep.to_csv_rows())]


def cmd_exhibit(cfg: RunConfig, n: int) -> list[Path]:
    dispatch = {
        1: _exhibit1,
        2: _exhibit2,
        3: _exhibit3,
        4: _exhibit4,
        5: cmd_omega,
        6: _exhibit6,
        7: cmd_converge,
    }
    if n not in dispatch:
        raise ConfigError("exhibit", f"exhibit number must be 1..7, got {n}")
    return dispatch[n](cfg)


# ------------------------------------------------------------------ main --

def _parse_caps(text: str) -> list[float | None]:
    out: list[float | None] = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok.lower() in ("uncapped", "none", "inf"):
            out.append(None)
        else:
            try:
                out.append(float(tok))
            except ValueError:
                raise ConfigError("--caps", f"bad cap {tok!r}") from None
    return out


def _parse_ints(text: str, flag: str) -> list[int]:
    try:
        return [int(t.strip()) for t in text.split(",")]
    except ValueError:
        raise ConfigError(flag, f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config file")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--seed", metavar="N", type=int, help="master seed")
    common.add_argument("--caps", metavar="LIST",
                        help="comma-separated TE ceilings; 'uncapped' allowed")
    common.add_argument("--windows", metavar="LIST",
                        help="comma-separated signal windows for sweep")
    common.add_argument("--horizons", metavar="LIST",
                        help="comma-separated forward horizons in trading days")

    p = argparse.ArgumentParser(
        prog="dynte",
        description="Regime-conditioned tracking-error engine",
    )
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("synth", parents=[common],
                   help="write a synthetic two-regime panel")
    pe = sub.add_parser("exhibit", parents=[common],
                        help="reproduce one of the numbered report tables")
    pe.add_argument("n", type=int, help="exhibit number, 1..7")
    sub.add_parser("converge", parents=[common],
                   help="metrics and bootstrap CIs across the TE-cap spectrum")
    sub.add_parser("omega", parents=[common],
                   help="forward returns by fear-gauge quintile")
    sub.add_parser("regret", parents=[common],
                   help="stay-vs-derisk outcomes from crisis troughs")
    sub.add_parser("sweep", parents=[common],
                   help="signal-window robustness sweep")
    sub.add_parser("props", parents=[common],
                   help="closed-form model checks as a pass/fail table")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        overrides = {
            "out": args.out,
            "seed": args.seed,
            "caps": _parse_caps(args.caps) if args.caps else None,
            "windows": _parse_ints(args.windows, "--windows") if args.windows else None,
            "horizons": _parse_ints(args.horizons, "--horizons") if args.horizons else None,
        }
        cfg = load_config(args.config, overrides)
        if args.command == "synth":
            paths = cmd_synth(cfg)
        elif args.command == "exhibit":
            paths = cmd_exhibit(cfg, args.n)
        elif args.command == "converge":
            paths = cmd_converge(cfg)
        elif args.command == "omega":
            paths = cmd_omega(cfg)
        elif args.command == "regret":
            paths = cmd_regret(cfg)
        elif args.command == "sweep":
            paths = cmd_sweep(cfg)
        elif args.command == "props":
            paths = cmd_props(cfg)
        else:  # pragma: no cover
            raise ConfigError("command", f"unknown command {args.command!r}")
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
