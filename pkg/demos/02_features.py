"""
From timestamps to features
===========================

The detector never looks at raw timestamps. It differences them into
inter-arrival gaps, rescales onto [0, 1], and (for plotting) measures the
step length between consecutive points of the rescaled series.
"""

import numpy as np

from blacklining import (
    ChannelKind, channel_defaults, euclidean_distances, first_difference, gen_attack,
    gen_normal, normalize,
)

normal = gen_normal(seed=1)
attack = gen_attack(channel_defaults(ChannelKind.CACHE), seed=1)

for name, trace in (("normal", normal), ("attack", attack)):
    gaps = first_difference(trace).values
    scaled = normalize(gaps)
    steps = euclidean_distances(scaled).values
    print("%s: %d gaps in [%g, %g] us" % (name, gaps.size, scaled.original_min, scaled.original_max))
    print("   first rescaled gaps:", np.round(scaled.values[:8], 3).tolist())
    # bursty traffic is mostly flat with rare tall spikes; the channel flips between two levels
    print("   step length mean %.4f, squared CV %.1f" % (steps.mean(), steps.var() / steps.mean() ** 2))

# a constant series has nothing to rescale, and says so
flat = normalize([250, 250, 250])
print("constant input:", flat.values.tolist(), "degenerate =", flat.degenerate)
