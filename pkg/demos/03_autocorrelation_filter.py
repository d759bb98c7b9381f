"""
Are the gaps independent?
=========================

A tenant's gaps are close to independent draws, so their lag-1
autocorrelation hugs zero. A covert sender holds each bit over a run of
probes, so neighbouring gaps look alike and the correlation climbs
towards 1. The first detection stage keeps anything inside the
white-noise band and forwards the rest.
"""

import numpy as np

from blacklining import (
    ChannelKind, FilterConfig, Pmf, TimingTrace, autocorr, channel_defaults, convolve_pmf,
    first_difference, gen_attack, gen_normal, iid_filter,
)
from blacklining.stats import empirical_pmf, lag_profile, total_variation

cfg = FilterConfig()
for name, trace in (
    ("normal", gen_normal(seed=3)),
    ("cpu load", gen_attack(channel_defaults(ChannelKind.CPU_LOAD), seed=3)),
    ("beacon", TimingTrace(np.arange(200) * 1000)),
):
    out = iid_filter(trace, cfg)
    print("%-9s r=%+.3f  band=%.3f  -> %s" % (name, out.r, out.band,
                                              "pass" if out.pass_normal else "forward"))

# the correlation decays slowly with lag while the sender holds a bit
gaps = first_difference(gen_attack(channel_defaults(ChannelKind.MEMORY_BUS), 0)).values
print("lags 1..10:", np.round(lag_profile(gaps, 10), 2).tolist())
print("ramp 1..5 at lag 1:", autocorr([1, 2, 3, 4, 5]))

# sums of independent variables: exact convolution against simulation
die = Pmf.uniform(range(1, 7))
exact = convolve_pmf(die, die)
rng = np.random.default_rng(0)
draws = die.sample(rng, 100_000) + die.sample(rng, 100_000)
print("P(7) exact %.4f, simulated %.4f, TV %.4f"
      % (exact.prob(7), empirical_pmf(draws).prob(7), total_variation(exact, empirical_pmf(draws))))
