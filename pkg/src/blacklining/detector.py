"""Two-stage covert timing-channel detector.

Each analysis window goes through:

1. the i.i.d. filter on the interval series: inside the white-noise band
   means normal;
2. the correlation threshold: forwarded windows with ``r`` below
   ``r_threshold`` are *suspect* and call for a larger window;
3. the monotonicity test: the window's request times, normalized onto
   [0, 1], are fitted with a least-squares polynomial against index
   fraction. A covert sender keeps its request rate bounded between two
   symbol rates, so the fitted curve keeps a positive slope. Bursty traffic
   alternates dense bursts with sparse stretches, and the fit dips.

Windows are tumbling. A trace alarms if any window alarms. While some
window was forwarded but none alarmed, the window doubles (up to
``max_window_doublings`` times). A window that outgrows the trace collapses
to the whole trace. A non-monotonic fit is final for the data it covers:
larger windows overlapping it cannot alarm.

Neither the retry decision nor the veto depends on ``r_threshold``, so
raising the threshold can only remove alarms.
"""

import enum
import hashlib
import json
from dataclasses import asdict, dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import InsufficientData, InvalidParams
from .polyfit import Monotonicity, MonotonicityVerdict, Polynomial, fit_poly, monotonic_on
from .preprocess import euclidean_distances, normalize
from .stats import FilterConfig, autocorr
from .trace import TimingTrace

RETRY_ADVICE = "Take larger interval, not likely to be an attack"
NON_MONOTONIC_ADVICE = "Not likely to be an attack"


class Verdict(enum.Enum):
    NORMAL = "normal"
    ATTACK = "attack"
    SUSPECT = "suspect"


class Stage(enum.Enum):
    FILTER = "filter"
    THRESHOLD = "threshold"
    MONOTONICITY = "monotonicity"


@dataclass(frozen=True)
class DetectorConfig:
    filter: FilterConfig = field(default_factory=FilterConfig)
    r_threshold: float = 0.6
    poly_degree: int = 4
    mono_eps: float = 1e-3
    mono_grid: int = 1024
    window: int = 512
    max_window_doublings: int = 3
    suspect_on_exhaust: bool = False

    def __post_init__(self):
        if not 0 < self.r_threshold < 1:
            raise InvalidParams("r_threshold must lie in (0, 1)")
        if self.window < self.filter.min_samples:
            raise InvalidParams("window must be at least filter.min_samples")
        if self.poly_degree < 1:
            raise InvalidParams("poly_degree must be at least 1")
        if self.max_window_doublings < 0:
            raise InvalidParams("max_window_doublings must be non-negative")
        if self.mono_eps < 0 or self.mono_grid < 16:
            raise InvalidParams("need mono_eps >= 0 and mono_grid >= 16")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "DetectorConfig":
        data = dict(data)
        data["filter"] = FilterConfig(**data.get("filter", {}))
        return cls(**data)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class WindowResult:
    start: int
    stop: int
    verdict: Verdict
    stage: Stage
    r: float
    band: float
    monotonicity: Optional[MonotonicityVerdict] = None
    fit: Optional[Polynomial] = None
    vetoed: bool = False


@dataclass(frozen=True)
class DetectionVerdict:
    verdict: Verdict
    stage: Stage
    r: float
    window_used: int
    monotonicity: Optional[MonotonicityVerdict] = None
    advice: Optional[str] = None
    windows: Tuple[WindowResult, ...] = ()

    @property
    def is_attack(self) -> bool:
        return self.verdict is Verdict.ATTACK

    def to_dict(self) -> dict:
        mono = None
        if self.monotonicity is not None:
            mono = {
                "kind": self.monotonicity.kind.value,
                "min_derivative": self.monotonicity.min_derivative,
                "max_derivative": self.monotonicity.max_derivative,
            }
        return {
            "verdict": self.verdict.value,
            "stage": self.stage.value,
            "r": self.r,
            "window_used": self.window_used,
            "monotonicity": mono,
            "advice": self.advice,
            "windows": [
                {
                    "start": w.start,
                    "stop": w.stop,
                    "verdict": w.verdict.value,
                    "stage": w.stage.value,
                    "r": w.r,
                    "band": w.band,
                    "monotonicity": w.monotonicity.kind.value if w.monotonicity else None,
                    "vetoed": w.vetoed,
                }
                for w in self.windows
            ],
        }


def tumbling_windows(n: int, window: int, min_samples: int):
    """Split ``range(n)`` into ``[start, stop)`` windows of ``window`` events.

    A trailing remainder shorter than ``min_samples`` is folded into the
    previous window.
    """
    if window >= n:
        return [(0, n)]
    bounds = [(s, min(s + window, n)) for s in range(0, n, window)]
    if len(bounds) > 1 and bounds[-1][1] - bounds[-1][0] < min_samples:
        last = bounds.pop()
        bounds[-1] = (bounds[-1][0], last[1])
    return bounds


def fit_request_curve(timestamps, degree: int) -> Polynomial:
    """Least-squares fit of normalized request times against index fraction."""
    y = normalize(np.asarray(timestamps, dtype=np.float64)).values
    x = np.linspace(0.0, 1.0, y.size)
    return fit_poly(x, y, degree)


def analyze_window(timestamps, config: DetectorConfig, use_monotonicity: bool = True,
                   start: int = 0, vetoed: bool = False) -> WindowResult:
    """Verdict for one window.

    With ``use_monotonicity`` every forwarded window is fitted, suspect or
    not. ``vetoed`` windows keep their diagnostics but cannot alarm.
    """
    ts = np.asarray(timestamps)
    gaps = np.diff(ts).astype(np.float64)
    r = autocorr(gaps, config.filter.lag)
    band = config.filter.iid_band(gaps.size)
    stop = start + ts.size
    if abs(r) < band:
        return WindowResult(start, stop, Verdict.NORMAL, Stage.FILTER, r, band)
    poly = mono = None
    if use_monotonicity:
        poly = fit_request_curve(ts, config.poly_degree)
        mono = monotonic_on(poly, 0.0, 1.0, config.mono_eps, config.mono_grid)
    if r < config.r_threshold:
        return WindowResult(start, stop, Verdict.SUSPECT, Stage.THRESHOLD, r, band, mono, poly)
    if not use_monotonicity:
        return WindowResult(start, stop, Verdict.ATTACK, Stage.THRESHOLD, r, band)
    alarm = mono.kind.is_monotone and not vetoed
    verdict = Verdict.ATTACK if alarm else Verdict.NORMAL
    return WindowResult(start, stop, verdict, Stage.MONOTONICITY, r, band, mono, poly, vetoed)


def _overlaps(a, b, spans):
    return any(a < y and x < b for x, y in spans)


def _run(trace: TimingTrace, config: DetectorConfig, use_monotonicity: bool) -> DetectionVerdict:
    n = len(trace)
    if n < config.filter.min_samples:
        raise InsufficientData(
            f"trace has {n} events; classification needs {config.filter.min_samples}"
        )
    ts = trace.timestamps
    window = config.window
    doublings = 0
    rejected = []  # spans whose fit was non-monotonic
    while True:
        bounds = tumbling_windows(n, window, config.filter.min_samples)
        results = tuple(
            analyze_window(ts[a:b], config, use_monotonicity, start=a,
                           vetoed=_overlaps(a, b, rejected))
            for a, b in bounds
        )
        rejected += [
            (w.start, w.stop) for w in results
            if w.monotonicity is not None and not w.monotonicity.kind.is_monotone
        ]
        used = min(window, n)
        alarms = [w for w in results if w.verdict is Verdict.ATTACK]
        if alarms:
            hit = max(alarms, key=lambda w: w.r)
            return DetectionVerdict(
                Verdict.ATTACK, hit.stage, hit.r, used, hit.monotonicity, None, results
            )
        forwarded = [w for w in results if w.stage is not Stage.FILTER]
        if not forwarded:
            return DetectionVerdict(
                Verdict.NORMAL, Stage.FILTER, max(w.r for w in results), used, None, None, results
            )
        suspects = [w for w in results if w.verdict is Verdict.SUSPECT]
        if window < n and doublings < config.max_window_doublings:
            window *= 2
            doublings += 1
            continue
        if suspects:
            top = max(suspects, key=lambda w: w.r)
            # out of data, not out of retries: the honest answer is "need more"
            out_of_data = doublings < config.max_window_doublings
            if out_of_data or config.suspect_on_exhaust:
                return DetectionVerdict(
                    Verdict.SUSPECT, Stage.THRESHOLD, top.r, used, None, RETRY_ADVICE, results
                )
            return DetectionVerdict(
                Verdict.NORMAL, Stage.THRESHOLD, top.r, used, None, RETRY_ADVICE, results
            )
        top = max(forwarded, key=lambda w: w.r)
        return DetectionVerdict(
            Verdict.NORMAL, Stage.MONOTONICITY, top.r, used, top.monotonicity,
            NON_MONOTONIC_ADVICE, results,
        )


def classify(trace: TimingTrace, config: DetectorConfig = DetectorConfig()) -> DetectionVerdict:
    """Full pipeline verdict for one trace."""
    return _run(trace, config, use_monotonicity=True)


def classify_staged(trace: TimingTrace, config: DetectorConfig = DetectorConfig()):
    """``(stage1, final)`` verdicts.

    ``stage1`` stops after the correlation threshold, so every forwarded
    window with ``r >= r_threshold`` alarms. ``final`` is :func:`classify`.
    """
    return _run(trace, config, use_monotonicity=False), _run(trace, config, use_monotonicity=True)


@dataclass(frozen=True)
class TraceFeatures:
    timestamps: np.ndarray
    intervals: np.ndarray
    normalized_intervals: np.ndarray
    normalized_times: np.ndarray
    distances: np.ndarray
    fit: Polynomial


def extract_features(trace: TimingTrace, degree: int = DetectorConfig.poly_degree) -> TraceFeatures:
    """Every intermediate series of the pipeline, over the whole trace."""
    if len(trace) < 2:
        raise InsufficientData("feature extraction needs at least 2 events")
    ts = trace.timestamps
    gaps = np.diff(ts).astype(np.float64)
    norm_gaps = normalize(gaps)
    return TraceFeatures(
        timestamps=ts,
        intervals=gaps,
        normalized_intervals=norm_gaps.values,
        normalized_times=normalize(ts.astype(np.float64)).values,
        distances=euclidean_distances(norm_gaps).values if gaps.size >= 2 else np.empty(0),
        fit=fit_request_curve(ts, min(degree, len(trace) - 1)),
    )


__all__ = [
    "DetectionVerdict",
    "DetectorConfig",
    "Monotonicity",
    "Stage",
    "TraceFeatures",
    "Verdict",
    "WindowResult",
    "analyze_window",
    "classify",
    "classify_staged",
    "extract_features",
    "fit_request_curve",
    "tumbling_windows",
]
