import csv
import io
import json
from dataclasses import replace

import pytest

from blacklining import (
    ChannelKind,
    Corpus,
    CorpusIntegrityError,
    DetectorConfig,
    EmptyCorpus,
    InvalidParams,
    Label,
    Verdict,
    build_corpus,
    channel_defaults,
    load_corpus,
    render_report,
    report_from_json,
    run_corpus,
    write_corpus,
)
from blacklining.evaluation import CSV_COLUMNS, KINDS, Counts, aggregate


def test_manifest_count_and_seeds():
    c = build_corpus(7, 5, seed0=3)
    assert len(c) == 7 + 3 * 5
    seeds = [e.seed for e in c.entries]
    assert len(set(seeds)) == len(seeds)
    assert [e.seed for e in c.entries[:7]] == list(range(3, 10))
    assert all(t.label is e.label for e, t in zip(c.entries, c.traces))


def test_corpus_is_deterministic(tmp_path):
    write_corpus(build_corpus(), tmp_path / "a")
    write_corpus(build_corpus(), tmp_path / "b")
    for f in sorted((tmp_path / "a").iterdir()):
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_attacks_use_channel_defaults_unless_overridden():
    c = build_corpus(3, 2)
    for e in c.entries:
        if e.label is Label.ATTACK:
            d = channel_defaults(e.channel)
            assert (e.params["t0_us"], e.params["t1_us"]) == (d.t0_us, d.t1_us)
    slow = replace(channel_defaults(ChannelKind.CACHE), t0_us=60.0)
    c = build_corpus(3, 2, channel_params={ChannelKind.CACHE: slow})
    assert {e.params["t0_us"] for e in c.entries if e.channel is ChannelKind.CACHE} == {60.0}


def test_counts_must_be_positive():
    with pytest.raises(InvalidParams):
        build_corpus(0, 5)
    with pytest.raises(InvalidParams):
        build_corpus(5, 5, background_fraction=1.5)


def test_round_trip_and_tamper_check(tmp_path):
    c = build_corpus(6, 2)
    write_corpus(c, tmp_path)
    loaded = load_corpus(tmp_path)
    assert loaded.traces == c.traces and loaded.entries == c.entries
    loaded.verify(regenerate=True)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert set(manifest) == {"corpus_seed", "entries"}
    assert {"id", "file", "label", "channel", "seed", "sha256"} <= set(manifest["entries"][0])

    victim = tmp_path / c.entries[0].file
    lines = victim.read_text().splitlines()
    lines[5] = '{"ts_us": %d}' % (json.loads(lines[5])["ts_us"] + 1)
    victim.write_text("\n".join(lines) + "\n")
    with pytest.raises(CorpusIntegrityError):
        load_corpus(tmp_path)
    unchecked = load_corpus(tmp_path, verify=False)
    with pytest.raises(CorpusIntegrityError):
        unchecked.verify()


def test_empty_corpus():
    with pytest.raises(EmptyCorpus):
        run_corpus(Corpus(0, (), ()))


def test_single_normal_trace():
    full = build_corpus(1, 1)
    one = Corpus(full.corpus_seed, full.entries[:1], full.traces[:1])
    rep = run_corpus(one)
    o = rep.overall.final
    assert (o.fp, o.fp + o.tn) == (0, 1)
    assert o.fn_rate is None


def test_rates_recompute_from_outcomes(default_report):
    for row in default_report.rows:
        mine = [o for o in default_report.outcomes if o.group.value == row.channel]
        for stage in ("stage1", "final"):
            c = getattr(row, stage)
            normals = [o for o in mine if o.label is Label.NORMAL]
            attacks = [o for o in mine if o.label is Label.ATTACK]
            fp = sum(getattr(o, stage) is Verdict.ATTACK for o in normals)
            fn = sum(getattr(o, stage) is not Verdict.ATTACK for o in attacks)
            assert (c.fp, c.tn, c.fn, c.tp) == (fp, len(normals) - fp, fn, len(attacks) - fn)
            assert c.fp_rate == fp / len(normals)
            assert c.fn_rate == fn / len(attacks)


def test_suspect_scored_as_normal():
    from blacklining.evaluation import TraceOutcome

    outs = [
        TraceOutcome("a", Label.ATTACK, ChannelKind.CACHE, Verdict.SUSPECT, Verdict.SUSPECT, 0.5),
        TraceOutcome("n", Label.NORMAL, ChannelKind.CACHE, Verdict.SUSPECT, Verdict.SUSPECT, 0.5),
    ]
    rep = aggregate(outs, "x", 0, [1, 2])
    assert rep.overall.final == Counts(tp=0, fp=0, tn=1, fn=1)


def test_stage_monotonicity_at_corpus_level(default_report):
    s1, fin = default_report.overall.stage1, default_report.overall.final
    assert fin.fp_rate <= s1.fp_rate
    assert fin.fn_rate >= s1.fn_rate
    assert fin.fn == 0


def test_reproducible_report(default_corpus, default_report):
    again = run_corpus(default_corpus)
    assert render_report(again, "json") == render_report(default_report, "json")
    other = run_corpus(default_corpus, DetectorConfig(r_threshold=0.7))
    assert other.config_digest != default_report.config_digest


def test_table_layout(default_report):
    text = render_report(default_report, "table")
    lines = text.splitlines()
    assert lines[0].split("  ")[0] == "Channel"
    mem = next(line for line in lines if line.startswith("Memory Bus"))
    assert "—" in mem
    assert any(line.startswith("CPU load") and "4.46%" in line for line in lines)
    assert any(line.startswith("Cache") and "1.89%" in line for line in lines)


def test_json_round_trip(default_report):
    text = render_report(default_report, "json")
    assert report_from_json(text) == default_report


def test_csv_shape(default_report):
    rows = list(csv.reader(io.StringIO(render_report(default_report, "csv"))))
    assert len(rows) == 1 + 3 + 1
    assert tuple(rows[0]) == CSV_COLUMNS
    assert [r[0] for r in rows[1:]] == [k.value for k in KINDS] + ["overall"]


def test_unknown_format(default_report):
    with pytest.raises(ValueError):
        render_report(default_report, "xml")
