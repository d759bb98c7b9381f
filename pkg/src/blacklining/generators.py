"""Seeded synthetic traces for both classes.

Normal traffic is a burst/idle mixture: bursts of geometrically many
requests separated by exponential gaps, with Pareto-distributed idle gaps
between bursts. A trace opens as the source wakes, so its first gap is an
idle gap. Optionally a periodic background agent (heartbeats, metric
scrapes) is superposed; while the bursty source sleeps, the agent's ticks
fill the idle period with a run of near-equal gaps, which is what gives
real service traffic its occasional short-lag correlation.

Attack traffic encodes a bit string in request spacing: gap ``t0`` for a 0
bit, ``t1`` for a 1 bit, each bit held for ``run_length`` consecutive gaps,
plus Gaussian timing jitter.
"""

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidParams
from .trace import ChannelKind, Label, TimingTrace


@dataclass(frozen=True)
class BurstParams:
    mean_burst_size: float = 400.0
    intra_burst_gap_mean_us: float = 5.0
    idle_gap_scale_us: float = 50_000.0
    idle_gap_shape: float = 1.5
    n_events: int = 1000
    background_period_us: Optional[float] = None
    background_jitter_us: float = 100.0

    def validate(self):
        for name in ("mean_burst_size", "intra_burst_gap_mean_us", "idle_gap_scale_us"):
            if not getattr(self, name) > 0:
                raise InvalidParams(f"{name} must be positive")
        if self.mean_burst_size < 1:
            raise InvalidParams("mean_burst_size must be >= 1 (bursts hold at least one request)")
        if not self.idle_gap_shape > 1:
            raise InvalidParams("idle_gap_shape must be > 1 so the idle-gap mean exists")
        if self.n_events < 2:
            raise InvalidParams("n_events must be >= 2")
        if self.background_period_us is not None and not self.background_period_us > 0:
            raise InvalidParams("background_period_us must be positive")
        if self.background_jitter_us < 0:
            raise InvalidParams("background_jitter_us must be non-negative")


@dataclass(frozen=True)
class ChannelParams:
    kind: ChannelKind
    t0_us: float
    t1_us: float
    jitter_sigma_us: float
    run_length: int
    message: Optional[Sequence[int]] = None
    n_events: int = 512

    def validate(self):
        if not (self.t0_us > 0 and self.t1_us > 0):
            raise InvalidParams("t0_us and t1_us must be positive")
        if self.t0_us == self.t1_us:
            raise InvalidParams("t0_us and t1_us must differ")
        if self.jitter_sigma_us < 0:
            raise InvalidParams("jitter_sigma_us must be non-negative")
        if int(self.run_length) != self.run_length or self.run_length < 1:
            raise InvalidParams("run_length must be a positive integer")
        if self.n_events < 2:
            raise InvalidParams("n_events must be >= 2")
        if self.message is not None:
            if len(self.message) == 0:
                raise InvalidParams("message must not be empty")
            if any(b not in (0, 1) for b in self.message):
                raise InvalidParams("message must be a sequence of 0/1 bits")
        if self.jitter_sigma_us >= min(self.t0_us, self.t1_us) / 3:
            warnings.warn(
                "jitter_sigma_us >= min(t0, t1)/3: symbols may overlap",
                RuntimeWarning,
                stacklevel=3,
            )


_CHANNEL_DEFAULTS = {
    ChannelKind.CPU_LOAD: dict(t0_us=5000.0, t1_us=10000.0, run_length=16, jitter_sigma_us=200.0),
    ChannelKind.MEMORY_BUS: dict(t0_us=100.0, t1_us=200.0, run_length=8, jitter_sigma_us=5.0),
    ChannelKind.CACHE: dict(t0_us=50.0, t1_us=120.0, run_length=8, jitter_sigma_us=3.0),
}


def channel_defaults(kind) -> ChannelParams:
    """Default parameters per channel kind (all times in microseconds).

    ======== ====== ====== ==== =====
    kind     t0     t1     k    sigma
    ======== ====== ====== ==== =====
    CpuLoad  5000   10000  16   200
    MemBus   100    200    8    5
    Cache    50     120    8    3
    ======== ====== ====== ==== =====
    """
    kind = ChannelKind(kind)
    return ChannelParams(kind=kind, **_CHANNEL_DEFAULTS[kind])


def _burst_gaps(params, rng):
    n_gaps = params.n_events - 1
    p_end = 1.0 / params.mean_burst_size
    gaps = np.empty(n_gaps)
    i = 0
    while i < n_gaps:
        # one cycle: the idle gap that ends a quiet period, then the burst
        idle = params.idle_gap_scale_us * (1.0 + rng.pareto(params.idle_gap_shape))
        size = int(rng.geometric(p_end))
        intra = rng.exponential(params.intra_burst_gap_mean_us, size - 1)
        chunk = np.concatenate(([idle], intra))[: n_gaps - i]
        gaps[i : i + chunk.size] = chunk
        i += chunk.size
    return gaps


def _to_timestamps(gaps):
    # gaps clamp to >= 1 us so timestamps stay strictly increasing
    ints = np.maximum(1, np.rint(gaps)).astype(np.int64)
    return np.concatenate(([0], np.cumsum(ints)))


def gen_normal(params: BurstParams = BurstParams(), seed: int = 0) -> TimingTrace:
    """Bursty normal traffic, labeled ``Label.NORMAL``."""
    params.validate()
    rng = np.random.default_rng(seed)
    ts = _to_timestamps(_burst_gaps(params, rng))

    if params.background_period_us is not None:
        period = params.background_period_us
        span = ts[-1]
        n_ticks = int(span // period) + 2
        tick_gaps = rng.normal(period, params.background_jitter_us, n_ticks)
        ticks = rng.uniform(0, period) + np.cumsum(np.maximum(1.0, tick_gaps))
        ticks = np.rint(ticks[ticks <= span]).astype(np.int64)
        merged = np.sort(np.concatenate((ts, ticks)), kind="stable")[: params.n_events]
        ts = _to_timestamps(np.diff(merged).astype(np.float64))

    return TimingTrace(ts, source_id=f"normal-{seed}", label=Label.NORMAL)


def gen_attack(params: ChannelParams, seed: int = 0) -> TimingTrace:
    """Covert-channel traffic, labeled ``Label.ATTACK`` with ``params.kind``.

    A supplied message is repeated cyclically (or truncated) to cover
    ``n_events - 1`` gaps; without one, bits are drawn fair from the seed.
    """
    params.validate()
    rng = np.random.default_rng(seed)
    k = int(params.run_length)
    n_gaps = params.n_events - 1
    n_bits = -(-n_gaps // k)
    if params.message is None:
        bits = rng.integers(0, 2, n_bits)
    else:
        msg = np.asarray(params.message, dtype=np.int64)
        bits = np.resize(msg, n_bits)
    symbols = np.where(np.repeat(bits, k)[:n_gaps] == 1, params.t1_us, params.t0_us)
    jitter = rng.normal(0.0, params.jitter_sigma_us, n_gaps) if params.jitter_sigma_us > 0 else 0.0
    ts = _to_timestamps(symbols + jitter)
    return TimingTrace(
        ts, source_id=f"{params.kind.value}-{seed}", label=Label.ATTACK, channel=params.kind
    )


def decode_message(trace: TimingTrace, t0_us: float, t1_us: float) -> list:
    """Quantize each gap to the nearer of ``t0_us``/``t1_us`` and return the bits."""
    gaps = np.diff(trace.timestamps).astype(np.float64)
    return [int(b) for b in np.abs(gaps - t1_us) < np.abs(gaps - t0_us)]
