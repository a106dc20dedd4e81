"""Packaged study inputs: the 5-bus case and its contingency list."""

from __future__ import annotations

from importlib import resources

from .case import Case, parse_case
from .fuzzy import FuzzyConfig, parse_fuzzy_config
from .stress import parse_contingency


def _read(name: str) -> str:
    return resources.files("busrank").joinpath("data", name).read_text(encoding="utf-8")


def stagg5_case() -> Case:
    """The classic 5-bus transmission test system the study is built on."""
    return parse_case(_read("stagg5.case"))


def study_contingencies() -> list[tuple[str, ...]]:
    """The 12 screened line outages of the study, in report order."""
    out = []
    for raw in _read("contingencies.txt").splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(parse_contingency(line))
    return out


def packaged_fuzzy_config() -> FuzzyConfig:
    """The shipped default config file, parsed."""
    return parse_fuzzy_config(_read("fuzzy_default.cfg"))
