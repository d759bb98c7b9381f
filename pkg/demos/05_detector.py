"""
The two-stage detector
======================

Stage 1 flags windows whose gaps are strongly correlated. Stage 2 fits
the window's request times, rescaled to [0, 1], against position in the
window. A covert sender's rate stays between two symbol rates, so that
curve climbs steadily; a tenant that alternates bursts with long silences
bends the fit and clears the alarm.
"""

from dataclasses import replace

import numpy as np

from blacklining import (
    BurstParams, ChannelKind, DetectorConfig, TimingTrace, channel_defaults, classify,
    classify_staged, gen_attack, gen_normal,
)

cfg = DetectorConfig()
busy = replace(BurstParams(), background_period_us=10_000.0)

for name, trace in (
    ("quiet tenant", gen_normal(seed=0)),
    ("tenant + agent", gen_normal(busy, seed=3)),
    ("cache channel", gen_attack(channel_defaults(ChannelKind.CACHE), seed=0)),
):
    stage1, final = classify_staged(trace, cfg)
    mono = final.monotonicity.kind.value if final.monotonicity else "-"
    print("%-15s stage1=%-7s final=%-7s r=%.3f  window=%d  fit=%s"
          % (name, stage1.verdict.value, final.verdict.value, final.r, final.window_used, mono))

# find a background-agent trace that stage 1 flags and stage 2 clears
for seed in range(50):
    stage1, final = classify_staged(gen_normal(busy, seed), cfg)
    if stage1.is_attack and not final.is_attack:
        print("seed %d: stage 1 alarmed, fit said %s -> %s"
              % (seed, final.monotonicity.kind.value, final.advice))
        break

# moderate correlation in a short trace: no room to widen the window
rng = np.random.default_rng(1)
g = np.zeros(199)
for i in range(1, 199):
    g[i] = 0.5 * g[i - 1] + rng.normal(0, 150)
short = TimingTrace(np.concatenate(([0], np.cumsum(np.rint(1000 + g).astype(int)))))
v = classify(short, cfg)
print(v.verdict.value, "r=%.2f" % v.r, "-", v.advice)

# a covert burst hiding after ordinary traffic still trips one window
ts = gen_normal(seed=2).timestamps
tail = gen_attack(channel_defaults(ChannelKind.MEMORY_BUS), 5).timestamps
mixed = TimingTrace(np.concatenate((ts, ts[-1] + 500 + tail)))
v = classify(mixed, cfg)
for w in v.windows:
    print("  events %4d..%4d  %-7s r=%.2f" % (w.start, w.stop, w.verdict.value, w.r))
