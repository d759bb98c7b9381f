"""Labeled corpora, staged FP/FN measurement, and the comparison report.

A corpus on disk is a directory of JSON Lines traces plus ``manifest.json``::

    {"corpus_seed": 42,
     "entries": [{"id", "file", "label", "channel", "group", "seed",
                  "sha256", "params", "params_digest"}, ...]}

``sha256`` hashes the trace file's bytes; ``params`` is enough to
regenerate the trace, so a corpus can be checked against tampering.

Each report row pairs one channel kind's attack traces with an equal share
of the normal traces (``group``), mirroring a per-channel experiment.
"""

import csv
import hashlib
import io
import json
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Dict, Optional, Tuple

from .detector import DetectorConfig, Verdict, classify_staged
from .errors import CorpusIntegrityError, EmptyCorpus, InvalidParams, TraceIOError
from .generators import BurstParams, ChannelParams, channel_defaults, gen_attack, gen_normal
from .trace import ChannelKind, Label, TimingTrace, dumps_jsonl, load_trace

KINDS = (ChannelKind.CPU_LOAD, ChannelKind.MEMORY_BUS, ChannelKind.CACHE)
SEED_STRIDE = 1_000_000
MANIFEST = "manifest.json"

# Published C2Detector rates (FP, FN) per channel; context only, not measured here.
C2DETECTOR_REFERENCE = {
    ChannelKind.CPU_LOAD: ("4.46%", "Nil"),
    ChannelKind.MEMORY_BUS: ("—", "Nil"),
    ChannelKind.CACHE: ("1.89%", "Nil"),
}


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _params_dict(params) -> dict:
    d = asdict(params)
    if isinstance(params, ChannelParams):
        d["kind"] = params.kind.value
        d["message"] = list(params.message) if params.message is not None else None
    return d


def _params_from_dict(label: Label, d: dict):
    if label is Label.NORMAL:
        return BurstParams(**d)
    d = dict(d)
    d["kind"] = ChannelKind(d["kind"])
    if d.get("message") is not None:
        d["message"] = tuple(d["message"])
    return ChannelParams(**d)


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    file: str
    label: Label
    channel: Optional[ChannelKind]
    group: ChannelKind
    seed: int
    sha256: str
    params: dict

    @property
    def params_digest(self) -> str:
        return _sha256(json.dumps(self.params, sort_keys=True))

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "file": self.file,
            "label": self.label.value,
            "channel": self.channel.value if self.channel else None,
            "group": self.group.value,
            "seed": self.seed,
            "sha256": self.sha256,
            "params": self.params,
            "params_digest": self.params_digest,
        }

    @classmethod
    def from_json(cls, d: dict) -> "CorpusEntry":
        return cls(
            id=d["id"],
            file=d["file"],
            label=Label(d["label"]),
            channel=ChannelKind(d["channel"]) if d.get("channel") else None,
            group=ChannelKind(d["group"]),
            seed=int(d["seed"]),
            sha256=d["sha256"],
            params=d["params"],
        )

    def regenerate(self) -> TimingTrace:
        params = _params_from_dict(self.label, self.params)
        if self.label is Label.NORMAL:
            return gen_normal(params, self.seed)
        return gen_attack(params, self.seed)


@dataclass(frozen=True)
class Corpus:
    corpus_seed: int
    entries: Tuple[CorpusEntry, ...]
    traces: Tuple[TimingTrace, ...]

    def __len__(self):
        return len(self.entries)

    def manifest(self) -> dict:
        return {"corpus_seed": self.corpus_seed, "entries": [e.to_json() for e in self.entries]}

    def verify(self, regenerate: bool = False) -> None:
        """Raise :class:`CorpusIntegrityError` if any trace disagrees with its digest."""
        for entry, trace in zip(self.entries, self.traces):
            if _sha256(dumps_jsonl(trace)) != entry.sha256:
                raise CorpusIntegrityError(f"{entry.id}: trace does not match recorded sha256")
            if regenerate and entry.regenerate() != trace:
                raise CorpusIntegrityError(f"{entry.id}: trace differs from its regenerated twin")


def _spread(i: int, fraction: float) -> bool:
    # evenly spaced selection: exactly round-down(n * fraction) picks among the first n
    return int((i + 1) * fraction) > int(i * fraction)


def build_corpus(
    n_normal: int = 100,
    n_attack_per_kind: int = 100,
    seed0: int = 42,
    normal_params: BurstParams = BurstParams(),
    background_fraction: float = 0.2,
    background_period_us: float = 10_000.0,
    channel_params: Optional[Dict[ChannelKind, ChannelParams]] = None,
    attack_events: int = 512,
) -> Corpus:
    """Deterministic labeled corpus.

    Normal traces use seeds ``seed0 .. seed0 + n_normal - 1``; a evenly
    spread ``background_fraction`` of them also carry a periodic background
    agent. Attack traces of the j-th kind use seeds starting at
    ``seed0 + (j + 1) * SEED_STRIDE``.
    """
    if n_normal < 1 or n_attack_per_kind < 1:
        raise InvalidParams("corpus counts must be at least 1")
    if max(n_normal, n_attack_per_kind) >= SEED_STRIDE:
        raise InvalidParams(f"at most {SEED_STRIDE - 1} traces per class")
    if not 0.0 <= background_fraction <= 1.0:
        raise InvalidParams("background_fraction must lie in [0, 1]")
    overrides = channel_params or {}

    entries, traces = [], []

    def add(entry_id, label, channel, group, seed, params, trace):
        entries.append(
            CorpusEntry(
                id=entry_id,
                file=f"{entry_id}.jsonl",
                label=label,
                channel=channel,
                group=group,
                seed=seed,
                sha256=_sha256(dumps_jsonl(trace)),
                params=_params_dict(params),
            )
        )
        traces.append(trace)

    for i in range(n_normal):
        seed = seed0 + i
        params = normal_params
        if _spread(i, background_fraction):
            params = replace(params, background_period_us=background_period_us)
        add(f"normal-{i:04d}", Label.NORMAL, None, KINDS[i % len(KINDS)], seed,
            params, gen_normal(params, seed))

    for j, kind in enumerate(KINDS):
        params = overrides.get(kind) or replace(channel_defaults(kind), n_events=attack_events)
        for i in range(n_attack_per_kind):
            seed = seed0 + (j + 1) * SEED_STRIDE + i
            add(f"{kind.value}-{i:04d}", Label.ATTACK, kind, kind, seed,
                params, gen_attack(params, seed))

    return Corpus(seed0, tuple(entries), tuple(traces))


def write_corpus(corpus: Corpus, directory) -> Path:
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        for entry, trace in zip(corpus.entries, corpus.traces):
            (directory / entry.file).write_text(dumps_jsonl(trace))
        (directory / MANIFEST).write_text(json.dumps(corpus.manifest(), indent=2) + "\n")
    except OSError as exc:
        raise TraceIOError(f"cannot write corpus to {directory}: {exc}") from exc
    return directory


def load_corpus(directory, verify: bool = True) -> Corpus:
    directory = Path(directory)
    try:
        manifest = json.loads((directory / MANIFEST).read_text())
    except OSError as exc:
        raise TraceIOError(f"cannot read {directory / MANIFEST}: {exc}") from exc
    entries = tuple(CorpusEntry.from_json(e) for e in manifest["entries"])
    traces = []
    for entry in entries:
        path = directory / entry.file
        if verify:
            try:
                digest = hashlib.sha256(path.read_bytes()).hexdigest()
            except OSError as exc:
                raise TraceIOError(f"cannot read {path}: {exc}") from exc
            if digest != entry.sha256:
                raise CorpusIntegrityError(f"{entry.file}: sha256 mismatch")
        traces.append(load_trace(path, "jsonl"))
    return Corpus(int(manifest["corpus_seed"]), entries, tuple(traces))


@dataclass(frozen=True)
class Counts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def fp_rate(self) -> Optional[float]:
        n = self.fp + self.tn
        return self.fp / n if n else None

    @property
    def fn_rate(self) -> Optional[float]:
        n = self.tp + self.fn
        return self.fn / n if n else None

    def add(self, label: Label, alarmed: bool) -> "Counts":
        if label is Label.ATTACK:
            return replace(self, tp=self.tp + alarmed, fn=self.fn + (not alarmed))
        return replace(self, fp=self.fp + alarmed, tn=self.tn + (not alarmed))

    def __add__(self, other):
        return Counts(self.tp + other.tp, self.fp + other.fp, self.tn + other.tn, self.fn + other.fn)


@dataclass(frozen=True)
class TraceOutcome:
    id: str
    label: Label
    group: ChannelKind
    stage1: Verdict
    final: Verdict
    r: float


@dataclass(frozen=True)
class ReportRow:
    channel: str
    stage1: Counts
    final: Counts


@dataclass(frozen=True)
class CorpusReport:
    rows: Tuple[ReportRow, ...]
    overall: ReportRow
    config_digest: str
    corpus_seed: int
    seed_min: int
    seed_max: int
    outcomes: Tuple[TraceOutcome, ...]

    def row(self, kind: ChannelKind) -> ReportRow:
        return next(r for r in self.rows if r.channel == kind.value)

    def to_dict(self) -> dict:
        def counts(c):
            return {"tp": c.tp, "fp": c.fp, "tn": c.tn, "fn": c.fn,
                    "fp_rate": c.fp_rate, "fn_rate": c.fn_rate}

        def row(r):
            return {"channel": r.channel, "stage1": counts(r.stage1), "final": counts(r.final)}

        return {
            "config_digest": self.config_digest,
            "corpus_seed": self.corpus_seed,
            "seed_range": [self.seed_min, self.seed_max],
            "rows": [row(r) for r in self.rows],
            "overall": row(self.overall),
            "outcomes": [
                {"id": o.id, "label": o.label.value, "group": o.group.value,
                 "stage1": o.stage1.value, "final": o.final.value, "r": o.r}
                for o in self.outcomes
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CorpusReport":
        def counts(c):
            return Counts(c["tp"], c["fp"], c["tn"], c["fn"])

        def row(r):
            return ReportRow(r["channel"], counts(r["stage1"]), counts(r["final"]))

        return cls(
            rows=tuple(row(r) for r in d["rows"]),
            overall=row(d["overall"]),
            config_digest=d["config_digest"],
            corpus_seed=d["corpus_seed"],
            seed_min=d["seed_range"][0],
            seed_max=d["seed_range"][1],
            outcomes=tuple(
                TraceOutcome(o["id"], Label(o["label"]), ChannelKind(o["group"]),
                             Verdict(o["stage1"]), Verdict(o["final"]), o["r"])
                for o in d["outcomes"]
            ),
        )


def aggregate(outcomes, config_digest: str, corpus_seed: int, seeds) -> CorpusReport:
    """Fold per-trace outcomes into per-channel and overall counts.

    Only ATTACK counts as an alarm; an unresolved SUSPECT is scored as normal.
    """
    per = {k: (Counts(), Counts()) for k in KINDS}
    for o in outcomes:
        s1, fin = per[o.group]
        per[o.group] = (s1.add(o.label, o.stage1 is Verdict.ATTACK),
                        fin.add(o.label, o.final is Verdict.ATTACK))
    rows = tuple(ReportRow(k.value, *per[k]) for k in KINDS)
    overall = ReportRow(
        "overall",
        sum((r.stage1 for r in rows), Counts()),
        sum((r.final for r in rows), Counts()),
    )
    seeds = list(seeds)
    return CorpusReport(rows, overall, config_digest, corpus_seed,
                        min(seeds), max(seeds), tuple(outcomes))


def run_corpus(corpus: Corpus, config: DetectorConfig = DetectorConfig()) -> CorpusReport:
    if len(corpus) == 0:
        raise EmptyCorpus("corpus has no traces")
    outcomes = []
    for entry, trace in zip(corpus.entries, corpus.traces):
        stage1, final = classify_staged(trace, config)
        outcomes.append(
            TraceOutcome(entry.id, entry.label, entry.group, stage1.verdict, final.verdict, final.r)
        )
    return aggregate(outcomes, config.digest(), corpus.corpus_seed, (e.seed for e in corpus.entries))


def _pct(rate):
    return "n/a" if rate is None else f"{100 * rate:.2f}%"


def _frac(num, den):
    return f"({num}/{den})"


def _render_table(report: CorpusReport) -> str:
    header = ("Channel", "FP (C2Detector, ref.)", "FP (this engine)",
              "FN (C2Detector, ref.)", "FN (this engine)")
    body = []
    for kind in KINDS:
        row = report.row(kind)
        ref_fp, ref_fn = C2DETECTOR_REFERENCE[kind]
        c = row.final
        body.append((
            kind.display_name,
            ref_fp,
            f"{_pct(c.fp_rate)} {_frac(c.fp, c.fp + c.tn)}",
            ref_fn,
            f"{_pct(c.fn_rate)} {_frac(c.fn, c.fn + c.tp)}",
        ))
    o = report.overall.final
    body.append(("Overall", "", f"{_pct(o.fp_rate)} {_frac(o.fp, o.fp + o.tn)}",
                 "", f"{_pct(o.fn_rate)} {_frac(o.fn, o.fn + o.tp)}"))
    widths = [max(len(r[i]) for r in (header, *body)) for i in range(len(header))]

    def fmt(r):
        return "  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip()

    s1 = report.overall.stage1
    lines = [fmt(header), fmt(tuple("-" * w for w in widths))]
    lines += [fmt(r) for r in body]
    lines += [
        "",
        f"Stage 1 (autocorrelation threshold only): FP {_pct(s1.fp_rate)}  FN {_pct(s1.fn_rate)}",
        f"Final (with monotonicity test):           FP {_pct(o.fp_rate)}  FN {_pct(o.fn_rate)}",
        "",
        "— : not reported for C2Detector.",
        "Reference columns are published C2Detector figures shown for layout only;",
        "they were not measured on this corpus.",
        f"corpus seed {report.corpus_seed}, seeds {report.seed_min}..{report.seed_max}, "
        f"config {report.config_digest[:16]}",
    ]
    return "\n".join(lines) + "\n"


CSV_COLUMNS = (
    "channel",
    "stage1_tp", "stage1_fp", "stage1_tn", "stage1_fn", "stage1_fp_rate", "stage1_fn_rate",
    "final_tp", "final_fp", "final_tn", "final_fn", "final_fp_rate", "final_fn_rate",
    "reference_fp", "reference_fn",
)


def _render_csv(report: CorpusReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    rows = [(r, C2DETECTOR_REFERENCE[ChannelKind(r.channel)]) for r in report.rows]
    rows.append((report.overall, ("", "")))
    for row, (ref_fp, ref_fn) in rows:
        cells = [row.channel]
        for c in (row.stage1, row.final):
            cells += [c.tp, c.fp, c.tn, c.fn,
                      "" if c.fp_rate is None else repr(c.fp_rate),
                      "" if c.fn_rate is None else repr(c.fn_rate)]
        w.writerow(cells + [ref_fp, ref_fn])
    return buf.getvalue()


def render_report(report: CorpusReport, format: str = "table") -> str:
    if format == "table":
        return _render_table(report)
    if format == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if format == "csv":
        return _render_csv(report)
    raise ValueError(f"unknown report format {format!r}")


def report_from_json(text: str) -> CorpusReport:
    return CorpusReport.from_dict(json.loads(text))
