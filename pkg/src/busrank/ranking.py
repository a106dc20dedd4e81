"""Scenario fan-out, per-contingency bus ranking, and FVSI comparison.

Every (contingency, stressed bus) pair becomes one critical-load search
followed by index extraction and fuzzy scoring; buses are then ranked
per contingency by decreasing Criticality Index. The competing FVSI
ordering rides along for the agreement report.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .case import Case
from .fuzzy import FuzzyConfig, SeverityResult, default_fuzzy_config, severity_result
from .indices import LineIndexRecord, bus_fvsi, line_index_records
from .powerflow import Diverged, solve
from .stress import (
    BaseInsolvableError,
    CriticalLoadResult,
    RampOptions,
    Scenario,
    SkippedScenario,
    find_critical_load,
    partition_scenarios,
)


@dataclass(frozen=True)
class ScenarioResult:
    scenario: Scenario
    critical: CriticalLoadResult
    records: tuple[LineIndexRecord, ...]
    severity: SeverityResult
    fvsi: float

    @property
    def ci(self) -> float:
        return self.severity.ci

    @property
    def q_critical(self) -> float:
        return self.critical.q_critical


@dataclass(frozen=True)
class RankedBus:
    bus: int
    ci: float
    rank: int  # position in the CI-descending order, 1-based dense
    fvsi: float
    rank_fvsi: int
    agree: bool  # same position under both orderings
    equal_ci: bool  # shares its exact CI with another bus in the table


@dataclass(frozen=True)
class RankingTable:
    contingency: tuple[str, ...]
    entries: tuple[RankedBus, ...]  # CI-descending
    results: tuple[ScenarioResult, ...]  # same order as entries

    def fuzzy_order(self) -> tuple[int, ...]:
        return tuple(e.bus for e in self.entries)

    def fvsi_order(self) -> tuple[int, ...]:
        by_rank = sorted(self.entries, key=lambda e: e.rank_fvsi)
        return tuple(e.bus for e in by_rank)


@dataclass(frozen=True)
class RankingRun:
    tables: tuple[RankingTable, ...]
    skips: tuple[SkippedScenario, ...]
    fuzzy_config: FuzzyConfig
    ramp_options: RampOptions
    lf_variant: str

    def __iter__(self):
        return iter(self.tables)

    def __len__(self) -> int:
        return len(self.tables)

    def __getitem__(self, k):
        return self.tables[k]


def evaluate_scenario(
    case: Case,
    scenario: Scenario,
    ramp_options: RampOptions,
    config: FuzzyConfig,
    lf_variant: str = "sending-pf",
) -> ScenarioResult:
    crit = find_critical_load(case, scenario.contingency, scenario.bus, ramp_options)
    records = tuple(
        line_index_records(case, scenario.contingency, crit.solution_at_critical, lf_variant)
    )
    sev = severity_result(
        [(b.id, crit.solution_at_critical.v(b.id)) for b in case.load_buses()],
        list(records),
        config,
    )
    return ScenarioResult(scenario, crit, records, sev, bus_fvsi(list(records)))


def rank_buses(results: list[ScenarioResult]) -> RankingTable:
    """One table for one contingency: CI descending, ties by ascending bus id."""
    if not results:
        raise ValueError("rank_buses needs at least one scenario result")
    conts = {r.scenario.contingency for r in results}
    if len(conts) != 1:
        raise ValueError("rank_buses mixes contingencies")

    by_ci = sorted(results, key=lambda r: (-r.ci, r.scenario.bus))
    by_fvsi = sorted(results, key=lambda r: (-r.fvsi, r.scenario.bus))
    fvsi_pos = {r.scenario.bus: k + 1 for k, r in enumerate(by_fvsi)}
    ci_counts: dict[float, int] = {}
    for r in by_ci:
        ci_counts[r.ci] = ci_counts.get(r.ci, 0) + 1

    entries = tuple(
        RankedBus(
            bus=r.scenario.bus,
            ci=r.ci,
            rank=k + 1,
            fvsi=r.fvsi,
            rank_fvsi=fvsi_pos[r.scenario.bus],
            agree=fvsi_pos[r.scenario.bus] == k + 1,
            equal_ci=ci_counts[r.ci] > 1,
        )
        for k, r in enumerate(by_ci)
    )
    return RankingTable(results[0].scenario.contingency, entries, tuple(by_ci))


def run_ranking(
    case: Case,
    contingencies,
    stressed_buses,
    ramp_options: RampOptions | None = None,
    fuzzy_config: FuzzyConfig | None = None,
    lf_variant: str = "sending-pf",
    workers: int = 1,
) -> RankingRun:
    """Full pipeline over the cross product; deterministic output.

    An empty contingency list means the intact network. The run aborts
    only if the intact network itself has no power-flow solution; a
    contingency whose unstressed state diverges becomes a skip record.
    """
    ramp_options = ramp_options or RampOptions()
    fuzzy_config = fuzzy_config or default_fuzzy_config()

    base = solve(case)
    if isinstance(base, Diverged):
        raise BaseInsolvableError("intact network has no power-flow solution")

    conts = list(contingencies)
    if not conts:
        conts = [()]
    scenarios, skipped = partition_scenarios(case, conts, stressed_buses)
    skips = list(skipped)

    def worker(scenario: Scenario):
        try:
            return evaluate_scenario(case, scenario, ramp_options, fuzzy_config, lf_variant)
        except BaseInsolvableError:
            return SkippedScenario(scenario.contingency, scenario.bus, "base-insolvable")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(worker, scenarios))
    else:
        outcomes = [worker(s) for s in scenarios]

    tables: list[RankingTable] = []
    group: list[ScenarioResult] = []
    group_cont: tuple[str, ...] | None = None

    def flush() -> None:
        if group:
            tables.append(rank_buses(group))
            group.clear()

    for outcome in outcomes:
        if isinstance(outcome, SkippedScenario):
            skips.append(outcome)
            continue
        cont = outcome.scenario.contingency
        if cont != group_cont:
            flush()
            group_cont = cont
        group.append(outcome)
    flush()
    return RankingRun(tuple(tables), tuple(skips), fuzzy_config, ramp_options, lf_variant)


def compare_with_fvsi(tables) -> "AgreementReport":
    rows = []
    matched = 0
    total = 0
    for table in tables:
        fuzzy = table.fuzzy_order()
        fvsi = table.fvsi_order()
        flags = tuple((e.bus, e.agree) for e in table.entries)
        matched += sum(1 for _, ok in flags if ok)
        total += len(flags)
        rows.append(AgreementRow(table.contingency, fuzzy, fvsi, flags))
    return AgreementReport(tuple(rows), matched, total)


@dataclass(frozen=True)
class AgreementRow:
    contingency: tuple[str, ...]
    fuzzy_order: tuple[int, ...]
    fvsi_order: tuple[int, ...]
    matches: tuple[tuple[int, bool], ...]


@dataclass(frozen=True)
class AgreementReport:
    rows: tuple[AgreementRow, ...]
    matched: int
    total: int
