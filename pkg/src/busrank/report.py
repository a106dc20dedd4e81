"""Report emission: human tables, CSV rows, reproducible JSON."""

from __future__ import annotations

import csv
import io
import json

from .fuzzy import FuzzyConfig
from .ranking import RankingRun, RankingTable, compare_with_fvsi

SCHEMA_VERSION = 1
CSV_COLUMNS = (
    "contingency",
    "bus",
    "q_critical_pu",
    "sum_si_vp",
    "sum_si_lf",
    "ci",
    "fvsi",
    "rank_fuzzy",
    "rank_fvsi",
)

_ROMAN = ("I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX", "X", "XI", "XII")


def _roman(rank: int) -> str:
    return _ROMAN[rank - 1] if 1 <= rank <= len(_ROMAN) else str(rank)


def _label(contingency: tuple[str, ...]) -> str:
    return ",".join(contingency) if contingency else "base"


def emit_report(run: RankingRun, format: str = "human", destination=None) -> str:
    if format == "human":
        text = _human(run)
    elif format == "csv":
        text = _csv(run)
    elif format == "json":
        text = render_json(run)
    else:
        raise ValueError(f"unknown report format {format!r}")
    if destination is not None:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def _human_table(table: RankingTable) -> list[str]:
    lines = [f"== Criticality ranking: {_label(table.contingency)} =="]
    lines.append(
        f"{'bus':>4} {'q_crit':>8} {'sum SI_V':>10} {'sum SI_LF':>10} "
        f"{'CI':>10} {'rank':>5} {'FVSI':>8} {'FVSI rank':>9}"
    )
    for entry, result in zip(table.entries, table.results):
        mark = " =" if entry.equal_ci else ""
        lines.append(
            f"{entry.bus:>4} {result.q_critical:>8.3f} {result.severity.sum_si_vp:>10.3f} "
            f"{result.severity.sum_si_lf:>10.3f} {entry.ci:>10.3f} {_roman(entry.rank):>5}"
            f"{mark} {entry.fvsi:>8.3f} {_roman(entry.rank_fvsi):>9}"
        )
    ties = [e.bus for e in table.entries if e.equal_ci]
    if ties:
        lines.append(f"(equal CI: buses {', '.join(str(b) for b in ties)})")
    return lines


def _human(run: RankingRun) -> str:
    lines: list[str] = []
    for table in run.tables:
        lines.extend(_human_table(table))
        lines.append("")
    report = compare_with_fvsi(run.tables)
    if report.rows:
        lines.append("== Ranking agreement: fuzzy vs FVSI ==")
        lines.append(f"{'contingency':<14} {'fuzzy order':<14} {'FVSI order':<14} agreement")
        for row in report.rows:
            fz = ",".join(str(b) for b in row.fuzzy_order)
            fv = ",".join(str(b) for b in row.fvsi_order)
            ok = sum(1 for _, m in row.matches if m)
            lines.append(f"{_label(row.contingency):<14} {fz:<14} {fv:<14} {ok}/{len(row.matches)}")
        lines.append(f"overall agreement: {report.matched}/{report.total}")
        lines.append("")
    if run.skips:
        lines.append("== Skipped scenarios ==")
        for skip in run.skips:
            lines.append(f"{_label(skip.contingency)} bus {skip.bus}: {skip.reason}")
        lines.append("")
    return "\n".join(lines)


def _csv(run: RankingRun) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for table in run.tables:
        for entry, result in zip(table.entries, table.results):
            writer.writerow(
                [
                    _label(table.contingency),
                    entry.bus,
                    result.q_critical,
                    result.severity.sum_si_vp,
                    result.severity.sum_si_lf,
                    entry.ci,
                    entry.fvsi,
                    entry.rank,
                    entry.rank_fvsi,
                ]
            )
    for skip in run.skips:
        writer.writerow([_label(skip.contingency), skip.bus, "", "", "", "", "", "", ""])
    return buf.getvalue()


def _config_echo(run: RankingRun) -> dict:
    cfg: FuzzyConfig = run.fuzzy_config
    return {
        "fuzzy": {
            "voltage_axis": list(cfg.voltage_axis),
            "voltage_mfs": {m.label: [m.a, m.b, m.c, m.d] for m in cfg.voltage_mfs},
            "lf_axis": list(cfg.lf_axis),
            "lf_mfs": {m.label: [m.a, m.b, m.c, m.d] for m in cfg.lf_mfs},
            "severity_axis": list(cfg.severity_axis),
            "severity_mfs": {m.label: [m.a, m.b, m.c, m.d] for m in cfg.severity_mfs},
            "voltage_rules": dict(cfg.voltage_rules),
            "lf_rules": dict(cfg.lf_rules),
            "grid_points": cfg.grid_points,
        },
        "ramp": {
            "coarse_step": run.ramp_options.coarse_step,
            "refinement_step": run.ramp_options.refinement_step,
            "q_max": run.ramp_options.q_max,
            "constant_power_factor": run.ramp_options.constant_power_factor,
        },
        "solver": {"tol": 1e-6, "max_iter": 30, "flat_start": True},
        "lf_variant": run.lf_variant,
    }


def render_json(run: RankingRun) -> str:
    tables = []
    for table in run.tables:
        entries = []
        for entry, result in zip(table.entries, table.results):
            sol = result.critical.solution_at_critical
            entries.append(
                {
                    "bus": entry.bus,
                    "q_critical_pu": result.q_critical,
                    "sum_si_vp": result.severity.sum_si_vp,
                    "sum_si_lf": result.severity.sum_si_lf,
                    "ci": entry.ci,
                    "fvsi": entry.fvsi,
                    "rank_fuzzy": entry.rank,
                    "rank_fvsi": entry.rank_fvsi,
                    "agree": entry.agree,
                    "equal_ci": entry.equal_ci,
                    "voltages": {str(b): sol.v(b) for b in sol.bus_ids},
                    "si_vp": [[bus, si] for bus, si in result.severity.si_vp],
                    "si_lf": [[line, si] for line, si in result.severity.si_lf],
                    "lf": {r.branch_id: r.lf for r in result.records},
                    "fvsi_lines": {r.branch_id: r.fvsi for r in result.records},
                }
            )
        tables.append({"contingency": list(table.contingency), "entries": entries})
    doc = {
        "schema_version": SCHEMA_VERSION,
        "config": _config_echo(run),
        "tables": tables,
        "skips": [
            {"contingency": list(s.contingency), "bus": s.bus, "reason": s.reason}
            for s in run.skips
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
