"""Critical-load search: ramp reactive load at one bus until collapse.

A scenario's critical load is the largest reactive load at the stressed
bus for which the network still has a stable operating point. Stability
here means two things at once: the solver converges, and no branch sits
at or beyond its transfer bound (max line index < 1). The search ramps
coarsely to the solver's divergence boundary, bisects that boundary,
then walks back down in refinement steps until the transfer bound holds,
so the reported point is the supremum of the stable range even where the
line index dips back below 1 at higher load.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
import scipy.linalg

from . import kernels
from .case import Case, build_ybus, check_connectivity
from .indices import line_index_records, max_lf
from .powerflow import (
    VM_CEIL,
    VM_FLOOR,
    BranchFlow,
    Diverged,
    PowerFlowOptions,
    PowerFlowSolution,
    _index_sets,
    _schedules,
    line_flows,
    solve,
    start_state,
)


class IslandedScenarioError(ValueError):
    """Contingency splits the network; rejected before any solve."""


class BaseInsolvableError(RuntimeError):
    """Power flow diverges at unchanged load: the outage itself is fatal."""


@dataclass(frozen=True)
class RampOptions:
    coarse_step: float = 0.05
    refinement_step: float = 0.005
    q_max: float = 12.0
    # Hold the bus power factor while ramping instead of ramping Q alone.
    # Not the reference procedure; provided as an alternative stress shape.
    constant_power_factor: bool = False

    def __post_init__(self) -> None:
        if not (self.coarse_step > 0.0 and self.refinement_step > 0.0):
            raise ValueError("ramp steps must be positive")
        if self.refinement_step > self.coarse_step:
            raise ValueError("refinement_step must not exceed coarse_step")
        if self.q_max <= 0.0:
            raise ValueError("q_max must be positive")


@dataclass(frozen=True)
class Scenario:
    contingency: tuple[str, ...]
    bus: int


@dataclass(frozen=True)
class SkippedScenario:
    contingency: tuple[str, ...]
    bus: int
    reason: str


@dataclass(frozen=True)
class CriticalLoadResult:
    bus: int
    contingency: tuple[str, ...]
    q_critical: float
    solution_at_critical: PowerFlowSolution
    branch_flows_at_critical: list[BranchFlow]


class _ChordProbe:
    """Fixed-direction solver anchored at the flat profile.

    Newton steps reuse one Jacobian factorization taken at the flat
    voltage profile, so every ramp point is attacked from the same
    starting point with the same descent directions. Unlike a warm
    start walking along the ramp, the outcome at a load level cannot
    depend on the path taken to reach it.
    """

    def __init__(self, case: Case, ybus, tol: float = 1e-6, max_iter: int = 30):
        self.case = case
        self.g = np.ascontiguousarray(ybus.real)
        self.b = np.ascontiguousarray(ybus.imag)
        self.tol = tol
        self.max_iter = max_iter
        self.ang_idx, self.mag_idx = _index_sets(case)
        self.bus_ids = tuple(b.id for b in case.buses)
        vm, va = start_state(case)
        p, q = kernels.power_injections(self.g, self.b, vm, va)
        jac = kernels.polar_jacobian(self.g, self.b, vm, va, p, q, self.ang_idx, self.mag_idx)
        self.lu = scipy.linalg.lu_factor(jac)

    def solve(self, load_overrides) -> PowerFlowSolution | None:
        vm, va = start_state(self.case)
        p_sched, q_sched = _schedules(self.case, load_overrides)
        n_ang = len(self.ang_idx)
        # Same mismatch counting as the full solver: max_iter checks.
        for it in range(self.max_iter):
            p, q = kernels.power_injections(self.g, self.b, vm, va)
            res = np.concatenate([(p_sched - p)[self.ang_idx], (q_sched - q)[self.mag_idx]])
            worst = float(np.max(np.abs(res))) if res.size else 0.0
            if worst < self.tol:
                return PowerFlowSolution(self.bus_ids, vm, va, it, worst)
            step = scipy.linalg.lu_solve(self.lu, res)
            va[self.ang_idx] += step[:n_ang]
            vm[self.mag_idx] += step[n_ang:]
            if np.any(vm <= VM_FLOOR) or np.any(vm > VM_CEIL):
                return None
        return None


def _overrides(case: Case, bus: int, q: float, options: RampOptions) -> dict[int, tuple[float, float]]:
    if not options.constant_power_factor:
        return {bus: (0.0, q)}
    base = next(b for b in case.buses if b.id == bus)
    if base.q_load <= 0.0:
        return {bus: (0.0, q)}
    return {bus: (q * base.p_load / base.q_load, q)}


def find_critical_load(
    case: Case,
    contingency,
    bus: int,
    options: RampOptions | None = None,
) -> CriticalLoadResult:
    options = options or RampOptions()
    outages = tuple(contingency)
    conn = check_connectivity(case, outages)
    if not conn.connected:
        raise IslandedScenarioError(f"contingency {','.join(outages) or '(none)'} islands the network")
    target = next((b for b in case.buses if b.id == bus), None)
    if target is None or target.kind != "load":
        raise ValueError(f"stressed bus {bus} is not a load bus")

    base = solve(case, outages=outages)
    if isinstance(base, Diverged):
        raise BaseInsolvableError(
            f"contingency {','.join(outages) or '(none)'}: power flow diverges at base load"
        )

    ybus = build_ybus(case, outages)
    probe = _ChordProbe(case, ybus)
    pf_options = PowerFlowOptions()

    # The probe must stand on its own at the unstressed scenario before
    # it is trusted for the ramp; where it cannot reach the base point,
    # the full Newton solver takes over for the whole scenario.
    use_probe = probe.solve({}) is not None

    def attempt(q: float) -> PowerFlowSolution | None:
        overrides = _overrides(case, bus, q, options)
        if use_probe:
            return probe.solve(overrides)
        result = solve(case, outages=outages, load_overrides=overrides, options=pf_options)
        return None if isinstance(result, Diverged) else result

    coarse = options.coarse_step
    fine = options.refinement_step

    q = 0.0
    while q < options.q_max and attempt(q + coarse) is not None:
        q += coarse
    lo, hi = q, q + coarse
    while hi - lo > fine:
        mid = 0.5 * (lo + hi)
        if attempt(mid) is None:
            hi = mid
        else:
            lo = mid

    # Walk down from the solver boundary until the transfer bound holds;
    # the line index is not monotone in load, so the first admissible
    # point from above is the top of the stable range.
    q = lo
    while q > 0.0:
        sol = attempt(q)
        if sol is not None:
            flows = line_flows(case, outages, sol)
            if max_lf(line_index_records(case, outages, sol)) < 1.0:
                return CriticalLoadResult(bus, outages, q, sol, flows)
        q = max(0.0, q - fine)

    sol = attempt(0.0)
    if sol is None:
        base_sol = base
    else:
        base_sol = sol
    return CriticalLoadResult(bus, outages, 0.0, base_sol, line_flows(case, outages, base_sol))


def enumerate_scenarios(case: Case, contingencies, stressed_buses) -> list[Scenario]:
    scenarios, _ = partition_scenarios(case, contingencies, stressed_buses)
    return scenarios


def partition_scenarios(
    case: Case,
    contingencies,
    stressed_buses,
) -> tuple[list[Scenario], list[SkippedScenario]]:
    """Cross product of contingencies and buses, split by connectivity.

    Order is deterministic: contingency list order, then ascending bus
    id. Duplicate contingency entries collapse to their first occurrence.
    """
    load_ids = {b.id for b in case.load_buses()}
    buses = sorted(set(stressed_buses))
    for b in buses:
        if b not in load_ids:
            raise ValueError(f"stressed bus {b} is not a load bus")

    seen: set[frozenset[str]] = set()
    ordered: list[tuple[str, ...]] = []
    for cont in contingencies:
        outages = tuple(cont)
        key = frozenset(outages)
        if key in seen:
            continue
        seen.add(key)
        ordered.append(outages)

    scenarios: list[Scenario] = []
    skipped: list[SkippedScenario] = []
    for outages in ordered:
        conn = check_connectivity(case, outages)
        for b in buses:
            if conn.connected:
                scenarios.append(Scenario(outages, b))
            else:
                skipped.append(SkippedScenario(outages, b, "islanded"))
    return scenarios, skipped


def parse_contingency(label: str) -> tuple[str, ...]:
    """One contingency label: branch ids joined by commas ("1-2,2-3")."""
    parts = tuple(p.strip() for p in label.split(",") if p.strip())
    return parts


def load_contingencies(path) -> list[tuple[str, ...]]:
    """Contingency-list file: one contingency per line, '#' comments."""
    out: list[tuple[str, ...]] = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            out.append(parse_contingency(line))
    return out


def screen_outages(case: Case, contingencies=None, max_order: int = 2) -> list[tuple[tuple[str, ...], float]]:
    """Rank outages by post-outage max line index at base load.

    A cheap severity screen, not the ranking pipeline: one power flow
    per candidate, no stress ramp. Insolvable candidates sort first with
    an infinite score; islanding candidates are dropped.
    """
    if contingencies is None:
        names = [br.id for br in case.branches]
        contingencies = [(n,) for n in names]
        if max_order >= 2:
            contingencies += [tuple(pair) for pair in combinations(names, 2)]
    scored: list[tuple[tuple[str, ...], float]] = []
    for cont in contingencies:
        outages = tuple(cont)
        if not check_connectivity(case, outages).connected:
            continue
        result = solve(case, outages=outages)
        if isinstance(result, Diverged):
            scored.append((outages, float("inf")))
            continue
        scored.append((outages, max_lf(line_index_records(case, outages, result))))
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored
