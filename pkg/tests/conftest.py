"""Shared fixtures: the bundled five-bus case and one full study run.

The study run (all twelve contingencies plus the intact base, three
stressed buses each) takes a couple of seconds, so it is computed once
per session and shared by the ranking, report, and acceptance tests.
"""
from __future__ import annotations

import pytest

from busrank import default_fuzzy_config, run_ranking
from busrank.fixtures import stagg5_case, study_contingencies


@pytest.fixture(scope="session")
def case():
    return stagg5_case()


@pytest.fixture(scope="session")
def contingencies():
    return study_contingencies()


@pytest.fixture(scope="session")
def config():
    return default_fuzzy_config()


@pytest.fixture(scope="session")
def study_run(case, contingencies):
    # Leading () keeps the intact base case in the run alongside the outages.
    return run_ranking(case, [()] + list(contingencies), [3, 4, 5])


@pytest.fixture(scope="session")
def tables_by_contingency(study_run):
    return {table.contingency: table for table in study_run.tables}


@pytest.fixture(scope="session")
def results(study_run):
    """(contingency tuple, bus) -> ScenarioResult, across the whole run."""
    out = {}
    for table in study_run.tables:
        for result in table.results:
            out[(table.contingency, result.scenario.bus)] = result
    return out
