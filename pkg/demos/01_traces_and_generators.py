"""
Synthetic traces: bursty tenants and covert senders
===================================================

Two kinds of request streams reach a shared resource. Ordinary tenants
fire bursts of requests and then go quiet for a heavy-tailed while. A
covert sender instead spaces its probes at one of two fixed intervals,
holding each bit for several probes.
"""

import tempfile
from dataclasses import replace
from pathlib import Path

import numpy as np

from blacklining import (
    BurstParams, ChannelKind, channel_defaults, gen_attack, gen_normal, load_trace, save_trace,
)
from blacklining.generators import decode_message

# a bursty tenant: 1000 requests, seeded so the run is repeatable
normal = gen_normal(BurstParams(), seed=7)
gaps = np.diff(normal.timestamps)
print(normal)
print("median gap %d us, longest gap %d us" % (np.median(gaps), gaps.max()))

# the same seed always yields the same trace
assert gen_normal(BurstParams(), seed=7) == normal

# the three covert channels differ only in their symbol timings
for kind in ChannelKind:
    p = channel_defaults(kind)
    print("%-11s t0=%6.0f  t1=%6.0f  k=%2d  sigma=%5.0f"
          % (kind.display_name, p.t0_us, p.t1_us, p.run_length, p.jitter_sigma_us))

# without jitter and with one probe per bit, the message reads straight off the gaps
p = replace(channel_defaults(ChannelKind.MEMORY_BUS),
            jitter_sigma_us=0, run_length=1, message=(1, 0, 1, 1, 0, 0, 1), n_events=8)
attack = gen_attack(p, seed=0)
print("timestamps:", attack.timestamps.tolist())
print("decoded:   ", decode_message(attack, p.t0_us, p.t1_us))

# traces round-trip through JSON Lines (labels in a header record) and CSV
with tempfile.TemporaryDirectory() as tmp:
    for name in ("attack.jsonl", "attack.csv"):
        path = Path(tmp) / name
        save_trace(attack, path)
        assert load_trace(path) == attack
    print((Path(tmp) / "attack.jsonl").read_text().splitlines()[:3])
