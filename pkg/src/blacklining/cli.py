"""Command-line interface: ``blacklining {generate,corpus,detect,evaluate}``.

``detect`` exit codes: 0 normal, 2 attack, 3 suspect. Errors: 64 usage,
65 malformed or insufficient data, 74 I/O.
"""

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .detector import DetectorConfig, Verdict, classify, extract_features
from .errors import (
    CorpusIntegrityError,
    EmptyCorpus,
    InsufficientData,
    InvalidParams,
    OrderError,
    ParseError,
    TraceIOError,
)
from .evaluation import build_corpus, load_corpus, render_report, run_corpus, write_corpus
from .generators import BurstParams, channel_defaults, gen_attack, gen_normal
from .stats import FilterConfig
from .trace import ChannelKind, load_trace, save_trace

EXIT_CODES = {Verdict.NORMAL: 0, Verdict.ATTACK: 2, Verdict.SUSPECT: 3}
EX_USAGE, EX_DATAERR, EX_IOERR = 64, 65, 74

KIND_FLAGS = {
    "normal": None,
    "cpu-load": ChannelKind.CPU_LOAD,
    "memory-bus": ChannelKind.MEMORY_BUS,
    "cache": ChannelKind.CACHE,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _add_detector_flags(p):
    g = p.add_argument_group("detector")
    g.add_argument("--threshold-r", type=float, default=0.6)
    g.add_argument("--poly-degree", type=int, default=DetectorConfig.poly_degree)
    g.add_argument("--mono-eps", type=float, default=1e-3)
    g.add_argument("--mono-grid", type=int, default=1024)
    g.add_argument("--window", type=int, default=512)
    g.add_argument("--max-doublings", type=int, default=3)
    g.add_argument("--min-samples", type=int, default=64)
    g.add_argument("--lag", type=int, default=1)
    g.add_argument("--band-z", type=float, default=1.96)
    g.add_argument("--suspect-on-exhaust", action="store_true")


def _config(args) -> DetectorConfig:
    return DetectorConfig(
        filter=FilterConfig(lag=args.lag, band_z=args.band_z, min_samples=args.min_samples),
        r_threshold=args.threshold_r,
        poly_degree=args.poly_degree,
        mono_eps=args.mono_eps,
        mono_grid=args.mono_grid,
        window=args.window,
        max_window_doublings=args.max_doublings,
        suspect_on_exhaust=args.suspect_on_exhaust,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="blacklining", description="Covert timing-channel detection toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", help="write one synthetic trace")
    gen.add_argument("--kind", choices=sorted(KIND_FLAGS), required=True)
    gen.add_argument("--n-events", type=int)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.add_argument("--format", choices=("jsonl", "csv"))
    b = gen.add_argument_group("normal traffic")
    b.add_argument("--mean-burst-size", type=float)
    b.add_argument("--intra-gap-us", type=float)
    b.add_argument("--idle-scale-us", type=float)
    b.add_argument("--idle-shape", type=float)
    b.add_argument("--background-period-us", type=float)
    b.add_argument("--background-jitter-us", type=float)
    c = gen.add_argument_group("covert channel")
    c.add_argument("--t0-us", type=float)
    c.add_argument("--t1-us", type=float)
    c.add_argument("--jitter-us", type=float)
    c.add_argument("--run-length", type=int)
    c.add_argument("--message", help="bit string, e.g. 1011")

    corpus = sub.add_parser("corpus", help="corpus tools")
    csub = corpus.add_subparsers(dest="corpus_command", required=True, parser_class=_Parser)
    cb = csub.add_parser("build", help="generate a labeled corpus directory")
    cb.add_argument("--n-normal", type=int, default=100)
    cb.add_argument("--n-attack", type=int, default=100, help="attack traces per channel kind")
    cb.add_argument("--seed", type=int, default=42)
    cb.add_argument("--out", required=True)
    cb.add_argument("--normal-events", type=int, default=BurstParams.n_events)
    cb.add_argument("--attack-events", type=int, default=512)
    cb.add_argument("--background-fraction", type=float, default=0.2)
    cb.add_argument("--background-period-us", type=float, default=10_000.0)

    det = sub.add_parser("detect", help="classify one trace")
    det.add_argument("file")
    det.add_argument("--format", choices=("jsonl", "csv"))
    out = det.add_mutually_exclusive_group()
    out.add_argument("--json", action="store_true", help="emit the full verdict as JSON")
    out.add_argument("--table", action="store_true", help="emit a short text summary (default)")
    det.add_argument("--dump-features", metavar="DIR")
    _add_detector_flags(det)

    ev = sub.add_parser("evaluate", help="run the detector over a corpus directory")
    ev.add_argument("dir")
    ev.add_argument("--report", choices=("table", "json", "csv"), default="table")
    ev.add_argument("--out")
    ev.add_argument("--no-verify", action="store_true", help="skip sha256 checks")
    _add_detector_flags(ev)
    return parser


def _cmd_generate(args):
    kind = KIND_FLAGS[args.kind]
    if kind is None:
        params = BurstParams()
        for attr, flag in (
            ("mean_burst_size", args.mean_burst_size),
            ("intra_burst_gap_mean_us", args.intra_gap_us),
            ("idle_gap_scale_us", args.idle_scale_us),
            ("idle_gap_shape", args.idle_shape),
            ("background_period_us", args.background_period_us),
            ("background_jitter_us", args.background_jitter_us),
            ("n_events", args.n_events),
        ):
            if flag is not None:
                params = replace(params, **{attr: flag})
        trace = gen_normal(params, args.seed)
    else:
        params = channel_defaults(kind)
        message = None
        if args.message is not None:
            if not args.message or set(args.message) - {"0", "1"}:
                raise InvalidParams("--message must be a non-empty string of 0/1")
            message = tuple(int(ch) for ch in args.message)
        for attr, flag in (
            ("t0_us", args.t0_us),
            ("t1_us", args.t1_us),
            ("jitter_sigma_us", args.jitter_us),
            ("run_length", args.run_length),
            ("message", message),
            ("n_events", args.n_events),
        ):
            if flag is not None:
                params = replace(params, **{attr: flag})
        trace = gen_attack(params, args.seed)
    save_trace(trace, args.out, args.format)
    return 0


def _cmd_corpus_build(args):
    corpus = build_corpus(
        n_normal=args.n_normal,
        n_attack_per_kind=args.n_attack,
        seed0=args.seed,
        normal_params=replace(BurstParams(), n_events=args.normal_events),
        background_fraction=args.background_fraction,
        background_period_us=args.background_period_us,
        attack_events=args.attack_events,
    )
    write_corpus(corpus, args.out)
    print(f"wrote {len(corpus)} traces to {args.out}")
    return 0


def _write_column(path, name, values):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", name])
        for i, v in enumerate(values):
            w.writerow([i, repr(float(v))])


def _dump_features(trace, config, directory):
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    feats = extract_features(trace, config.poly_degree)
    _write_column(d / "intervals.csv", "interval_us", feats.intervals)
    _write_column(d / "normalized_intervals.csv", "normalized_interval", feats.normalized_intervals)
    _write_column(d / "normalized_times.csv", "normalized_time", feats.normalized_times)
    _write_column(d / "distances.csv", "distance", feats.distances)
    with open(d / "fit.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["power", "coefficient"])
        for j, c in enumerate(feats.fit.coeffs):
            w.writerow([j, repr(float(c))])


def _cmd_detect(args):
    config = _config(args)
    trace = load_trace(args.file, args.format)
    if args.dump_features:
        try:
            _dump_features(trace, config, args.dump_features)
        except OSError as exc:
            raise TraceIOError(f"cannot write features: {exc}") from exc
    result = classify(trace, config)
    if args.json:
        print(json.dumps(result.to_dict(), indent=2))
    else:
        mono = f"  monotonicity={result.monotonicity.kind.value}" if result.monotonicity else ""
        print(f"{result.verdict.value.upper()}  stage={result.stage.value}  r={result.r:.4f}  "
              f"window={result.window_used}{mono}")
        if result.advice:
            print(result.advice)
    return EXIT_CODES[result.verdict]


def _cmd_evaluate(args):
    corpus = load_corpus(args.dir, verify=not args.no_verify)
    text = render_report(run_corpus(corpus, _config(args)), args.report)
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            raise TraceIOError(f"cannot write {args.out}: {exc}") from exc
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "generate":
            return _cmd_generate(args)
        if args.command == "corpus":
            return _cmd_corpus_build(args)
        if args.command == "detect":
            return _cmd_detect(args)
        return _cmd_evaluate(args)
    except (InvalidParams, ValueError) as exc:
        print(f"blacklining: {exc}", file=sys.stderr)
        return EX_USAGE
    except (ParseError, OrderError, InsufficientData, CorpusIntegrityError, EmptyCorpus) as exc:
        print(f"blacklining: {exc}", file=sys.stderr)
        return EX_DATAERR
    except (TraceIOError, OSError) as exc:
        print(f"blacklining: {exc}", file=sys.stderr)
        return EX_IOERR


if __name__ == "__main__":
    sys.exit(main())
