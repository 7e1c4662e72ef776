"""Event-study tables on a synthetic panel: forward returns by fear-gauge
quintile, and the cost of de-risking at a drawdown trough."""

import numpy as np

from dynte.events import find_trough, omega_table, regret_table
from dynte.simulate import benchmark_7030
from dynte.timeseries import SynthParams, synth_regime_panel, prices_from_returns


def main():
    panel, _ = synth_regime_panel(SynthParams(horizon=5040, seed=12))
    eq, bd, vix = panel["BENCH_EQ"], panel["BENCH_BD"], panel["VIX"]
    prices = prices_from_returns(eq)

    rep = omega_table(vix, prices, horizons=(21, 63, 126, 252))
    print("annualized forward return by gauge quintile")
    print(f"{'h':>4} {'q1':>8} {'q3':>8} {'q5':>8} {'q5-q1':>8} {'nw t':>6}")
    for i, h in enumerate(rep.horizons):
        m = rep.means[i]
        print(f"{h:4d} {m[0]:8.2%} {m[2]:8.2%} {m[4]:8.2%} "
              f"{rep.spreads[i]:8.2%} {rep.t_stats[i]:6.2f}")

    # deepest drawdown anywhere in the sample, then the cost of bailing out
    bench = benchmark_7030(eq, bd)
    cal = bench.calendar
    trough = find_trough(bench, (cal.dates[0], cal.dates[-1]), vix=vix)
    print(f"\ntrough {trough.date}  drawdown {trough.drawdown:.1%}"
          f"  gauge level {trough.vix:.1f}")
    (entry,) = regret_table(eq, bd, [("worst", trough)], horizons=(63, 126, 252))
    for h, s, d, r in zip(entry.horizons, entry.stay, entry.derisk, entry.regret):
        print(f"  {h:3d}d  stay {s:+8.2%}  derisk {d:+8.2%}  regret {r:+8.2%}")


if __name__ == "__main__":
    main()
