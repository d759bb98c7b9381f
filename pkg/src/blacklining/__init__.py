"""Covert timing-channel detection for shared-resource request traces."""

__version__ = "0.1.0"

from .detector import (
    DetectionVerdict,
    DetectorConfig,
    Stage,
    Verdict,
    classify,
    classify_staged,
    extract_features,
)
from .errors import (
    BlackliningError,
    CorpusIntegrityError,
    DegreeTooHigh,
    EmptyCorpus,
    EmptyInput,
    InsufficientData,
    InvalidInterval,
    InvalidParams,
    OrderError,
    ParseError,
    RankDeficient,
    TraceIOError,
)
from .evaluation import (
    Corpus,
    CorpusReport,
    build_corpus,
    load_corpus,
    render_report,
    report_from_json,
    run_corpus,
    write_corpus,
)
from .generators import BurstParams, ChannelParams, channel_defaults, gen_attack, gen_normal
from .polyfit import (
    Monotonicity,
    MonotonicityVerdict,
    Polynomial,
    derivative,
    fit_poly,
    monotonic_on,
    poly_sub,
)
from .preprocess import (
    DistanceSeries,
    NormalizedSeries,
    euclidean_distances,
    first_difference,
    normalize,
)
from .stats import FilterConfig, Pmf, autocorr, convolve_pmf, iid_filter
from .trace import ChannelKind, IntervalSeries, Label, TimingTrace, load_trace, save_trace

__all__ = [
    "BlackliningError",
    "BurstParams",
    "ChannelKind",
    "ChannelParams",
    "Corpus",
    "CorpusIntegrityError",
    "CorpusReport",
    "DegreeTooHigh",
    "DetectionVerdict",
    "DetectorConfig",
    "DistanceSeries",
    "EmptyCorpus",
    "EmptyInput",
    "FilterConfig",
    "InsufficientData",
    "IntervalSeries",
    "InvalidInterval",
    "InvalidParams",
    "Label",
    "Monotonicity",
    "MonotonicityVerdict",
    "NormalizedSeries",
    "OrderError",
    "ParseError",
    "Pmf",
    "Polynomial",
    "RankDeficient",
    "Stage",
    "TimingTrace",
    "TraceIOError",
    "Verdict",
    "autocorr",
    "build_corpus",
    "channel_defaults",
    "classify",
    "classify_staged",
    "convolve_pmf",
    "derivative",
    "euclidean_distances",
    "extract_features",
    "first_difference",
    "fit_poly",
    "gen_attack",
    "gen_normal",
    "iid_filter",
    "load_corpus",
    "load_trace",
    "monotonic_on",
    "normalize",
    "poly_sub",
    "render_report",
    "report_from_json",
    "run_corpus",
    "save_trace",
    "write_corpus",
]
