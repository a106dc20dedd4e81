"""Report emission: the three output formats and their invariants."""
from __future__ import annotations

import csv
import dataclasses
import io
import json

import pytest

from busrank import emit_report
from busrank.report import CSV_COLUMNS, render_json
from busrank.stress import SkippedScenario


@pytest.fixture(scope="module")
def study_csv(study_run):
    # The study proper excludes the base table when counting its 36 rows.
    trimmed = dataclasses.replace(study_run, tables=study_run.tables[1:], skips=())
    return emit_report(trimmed, format="csv")


def test_csv_has_36_study_rows(study_csv):
    rows = list(csv.reader(io.StringIO(study_csv)))
    assert rows[0] == list(CSV_COLUMNS)
    assert len(rows) == 1 + 36


def test_csv_row_content(study_run):
    text = emit_report(study_run, format="csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert len(rows) == 1 + 39
    first = dict(zip(CSV_COLUMNS, rows[1]))
    assert first["contingency"] == "base"
    assert first["bus"] == "3"
    assert first["rank_fuzzy"] == "1"
    # Numeric cells round-trip at full precision.
    assert float(first["q_critical_pu"]) == study_run.tables[0].results[0].q_critical
    assert float(first["ci"]) == study_run.tables[0].entries[0].ci
    assert (
        float(first["sum_si_vp"]) + float(first["sum_si_lf"]) == float(first["ci"])
    )


def test_csv_quotes_multi_branch_labels(study_run):
    text = emit_report(study_run, format="csv")
    assert '"1-2,2-3"' in text


def test_csv_skip_rows(study_run):
    with_skip = dataclasses.replace(
        study_run,
        tables=study_run.tables[:1],
        skips=(SkippedScenario(("1-2", "1-3"), 3, "islanded"),),
    )
    rows = list(csv.reader(io.StringIO(emit_report(with_skip, format="csv"))))
    last = rows[-1]
    assert last[0] == "1-2,1-3"
    assert last[1] == "3"
    assert last[2:] == [""] * 7


def test_human_layout(study_run):
    text = emit_report(study_run, format="human")
    assert text.count("== Criticality ranking:") == 13
    assert "== Criticality ranking: base ==" in text
    assert "== Criticality ranking: 1-2,2-3 ==" in text
    assert "== Ranking agreement: fuzzy vs FVSI ==" in text
    assert "overall agreement:" in text
    # Roman ordinals appear in the rank column.
    base_block = text.split("== Criticality ranking: base ==")[1].split("==")[0]
    assert " I" in base_block and " II" in base_block and " III" in base_block
    # No skips in the full study, so no skip section.
    assert "Skipped scenarios" not in text


def test_human_skip_section(study_run):
    with_skip = dataclasses.replace(
        study_run,
        tables=study_run.tables[:1],
        skips=(SkippedScenario(("2-4",), 5, "base-insolvable"),),
    )
    text = emit_report(with_skip, format="human")
    assert "== Skipped scenarios ==" in text
    assert "2-4 bus 5: base-insolvable" in text


def test_human_tie_annotation(study_run):
    table = study_run.tables[0]
    tied = dataclasses.replace(
        table,
        entries=(
            dataclasses.replace(table.entries[0], equal_ci=True),
            dataclasses.replace(table.entries[1], equal_ci=True),
            table.entries[2],
        ),
    )
    text = emit_report(dataclasses.replace(study_run, tables=(tied,)), format="human")
    assert "(equal CI: buses 3, 4)" in text
    assert "I =" in text  # the tie mark rides the fuzzy rank column


def test_json_structure(study_run):
    doc = json.loads(render_json(study_run))
    assert doc["schema_version"] == 1
    assert len(doc["tables"]) == 13
    assert doc["skips"] == []
    config = doc["config"]
    assert config["solver"] == {"tol": 1e-6, "max_iter": 30, "flat_start": True}
    assert config["lf_variant"] == "sending-pf"
    assert config["fuzzy"]["voltage_mfs"]["LV"] == [0.5, 0.5, 0.80, 0.95]
    assert config["ramp"]["refinement_step"] == 0.005
    base_entries = doc["tables"][0]["entries"]
    assert [e["bus"] for e in base_entries] == [3, 4, 5]
    for entry in base_entries:
        assert entry["ci"] == entry["sum_si_vp"] + entry["sum_si_lf"]
        assert set(entry["voltages"]) == {"1", "2", "3", "4", "5"}
        assert len(entry["lf"]) == 7
        assert len(entry["si_lf"]) == 7


def test_json_round_trips_ci_exactly(study_run):
    doc = json.loads(render_json(study_run))
    emitted = {
        (tuple(t["contingency"]), e["bus"]): e["ci"]
        for t in doc["tables"]
        for e in t["entries"]
    }
    for table in study_run.tables:
        for entry in table.entries:
            assert emitted[(table.contingency, entry.bus)] == entry.ci


def test_emit_writes_destination(study_run, tmp_path):
    out = tmp_path / "report.json"
    text = emit_report(study_run, format="json", destination=out)
    assert out.read_text(encoding="utf-8") == text


def test_emit_propagates_write_errors(study_run, tmp_path):
    with pytest.raises(OSError):
        emit_report(study_run, format="csv", destination=tmp_path / "missing" / "out.csv")


def test_emit_rejects_unknown_format(study_run):
    with pytest.raises(ValueError, match="unknown report format"):
        emit_report(study_run, format="xml")


def test_emit_is_deterministic(study_run):
    for fmt in ("human", "csv", "json"):
        assert emit_report(study_run, format=fmt) == emit_report(study_run, format=fmt)
