"""Rank power-system load buses by proximity to voltage collapse.

Pipeline: Newton-Raphson power flow -> reactive stress to the critical
load -> per-line transfer indices -> fuzzy severity scoring -> per
contingency bus ranking with an FVSI comparison column.
"""

from .case import (
    Branch,
    Bus,
    Case,
    CaseError,
    build_ybus,
    check_connectivity,
    load_case,
    parse_case,
    serialize_case,
)
from .fuzzy import (
    FuzzyConfig,
    FuzzyConfigError,
    MembershipFunction,
    SeverityResult,
    criticality_index,
    default_fuzzy_config,
    load_fuzzy_config,
    membership,
    severity_lf,
    severity_voltage,
)
from .indices import LineIndexRecord, bus_fvsi, fvsi, lf_index, line_index_records
from .powerflow import (
    BranchFlow,
    Diverged,
    PowerFlowOptions,
    PowerFlowSolution,
    line_flows,
    solve,
)
from .ranking import (
    RankingRun,
    RankingTable,
    ScenarioResult,
    compare_with_fvsi,
    rank_buses,
    run_ranking,
)
from .report import emit_report
from .stress import (
    BaseInsolvableError,
    CriticalLoadResult,
    IslandedScenarioError,
    RampOptions,
    Scenario,
    enumerate_scenarios,
    find_critical_load,
    screen_outages,
)

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "Bus",
    "Case",
    "CaseError",
    "build_ybus",
    "check_connectivity",
    "load_case",
    "parse_case",
    "serialize_case",
    "FuzzyConfig",
    "FuzzyConfigError",
    "MembershipFunction",
    "SeverityResult",
    "criticality_index",
    "default_fuzzy_config",
    "load_fuzzy_config",
    "membership",
    "severity_lf",
    "severity_voltage",
    "LineIndexRecord",
    "bus_fvsi",
    "fvsi",
    "lf_index",
    "line_index_records",
    "BranchFlow",
    "Diverged",
    "PowerFlowOptions",
    "PowerFlowSolution",
    "line_flows",
    "solve",
    "RankingRun",
    "RankingTable",
    "ScenarioResult",
    "compare_with_fvsi",
    "rank_buses",
    "run_ranking",
    "emit_report",
    "BaseInsolvableError",
    "CriticalLoadResult",
    "IslandedScenarioError",
    "RampOptions",
    "Scenario",
    "enumerate_scenarios",
    "find_critical_load",
    "screen_outages",
]
