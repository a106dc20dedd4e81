"""Two parallel single-input fuzzy inference systems and their sum.

One system maps a load-bus voltage to a severity index, the other maps
a branch transfer index to a severity index. Each uses min activation,
max aggregation, and centroid defuzzification on a fixed output grid.
The Criticality Index of a stressed bus is the sum of every voltage
severity and every line severity at that bus's critical state.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .case import Case
from .indices import LineIndexRecord, line_index_records

VOLTAGE_LABELS = ("LV", "NV", "OV")
LF_LABELS = ("VS", "S", "M", "H", "VH")
SEVERITY_LABELS = ("VLS", "LS", "BS", "AS", "MS")


class FuzzyConfigError(ValueError):
    pass


@dataclass(frozen=True)
class MembershipFunction:
    """Trapezoid on breakpoints a <= b <= c <= d; degree 1 exactly on [b,c].

    Triangles set b = c; shoulders set a = b or c = d.
    """

    label: str
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        if not (self.a <= self.b <= self.c <= self.d):
            raise FuzzyConfigError(
                f"{self.label}: breakpoints must be ordered, got "
                f"({self.a}, {self.b}, {self.c}, {self.d})"
            )

    def degree(self, x: float) -> float:
        if self.b <= x <= self.c:
            return 1.0
        if x <= self.a or x >= self.d:
            return 0.0
        if x < self.b:
            return (x - self.a) / (self.b - self.a)
        return (self.d - x) / (self.d - self.c)

    def degrees(self, xs: np.ndarray) -> np.ndarray:
        out = np.zeros_like(xs)
        out[(xs >= self.b) & (xs <= self.c)] = 1.0
        if self.b > self.a:
            m = (xs > self.a) & (xs < self.b)
            out[m] = (xs[m] - self.a) / (self.b - self.a)
        if self.d > self.c:
            m = (xs > self.c) & (xs < self.d)
            out[m] = (self.d - xs[m]) / (self.d - self.c)
        return out


@dataclass(frozen=True)
class FuzzyConfig:
    voltage_axis: tuple[float, float]
    voltage_mfs: tuple[MembershipFunction, ...]
    lf_axis: tuple[float, float]
    lf_mfs: tuple[MembershipFunction, ...]
    severity_axis: tuple[float, float]
    severity_mfs: tuple[MembershipFunction, ...]
    voltage_rules: tuple[tuple[str, str], ...]  # (input label, severity label)
    lf_rules: tuple[tuple[str, str], ...]
    grid_points: int = 1001

    def __post_init__(self) -> None:
        for axis, name in ((self.voltage_axis, "voltage"), (self.lf_axis, "lf"), (self.severity_axis, "severity")):
            if not axis[0] < axis[1]:
                raise FuzzyConfigError(f"{name} axis must satisfy min < max, got {axis}")
        if self.grid_points < 2:
            raise FuzzyConfigError("grid_points must be at least 2")
        _require_labels("voltage", self.voltage_mfs, VOLTAGE_LABELS)
        _require_labels("lf", self.lf_mfs, LF_LABELS)
        _require_labels("severity", self.severity_mfs, SEVERITY_LABELS)
        _require_rules("voltage", self.voltage_rules, VOLTAGE_LABELS)
        _require_rules("lf", self.lf_rules, LF_LABELS)
        _require_coverage("voltage", self.voltage_mfs, self.voltage_axis)
        _require_coverage("lf", self.lf_mfs, self.lf_axis)

    def mf(self, partition: str, label: str) -> MembershipFunction:
        mfs = {"voltage": self.voltage_mfs, "lf": self.lf_mfs, "severity": self.severity_mfs}[partition]
        return next(m for m in mfs if m.label == label)


def _require_labels(name: str, mfs, expected: tuple[str, ...]) -> None:
    got = tuple(m.label for m in mfs)
    if sorted(got) != sorted(expected):
        raise FuzzyConfigError(f"{name} partition labels must be {set(expected)}, got {set(got)}")
    if len(set(got)) != len(got):
        raise FuzzyConfigError(f"{name} partition repeats a label")


def _require_rules(name: str, rules, inputs: tuple[str, ...]) -> None:
    heads = [r[0] for r in rules]
    if sorted(heads) != sorted(inputs):
        raise FuzzyConfigError(f"{name} rules must cover inputs {set(inputs)} exactly once")
    for _, consequent in rules:
        if consequent not in SEVERITY_LABELS:
            raise FuzzyConfigError(f"{name} rule consequent {consequent!r} is not a severity label")


def _require_coverage(name: str, mfs, axis: tuple[float, float]) -> None:
    xs = np.linspace(axis[0], axis[1], 2001)
    peak = np.zeros_like(xs)
    for m in mfs:
        peak = np.maximum(peak, m.degrees(xs))
    if not (peak > 0.0).all():
        hole = float(xs[int(np.argmin(peak))])
        raise FuzzyConfigError(f"{name} partition leaves x = {hole:.6g} with zero membership")


@dataclass(frozen=True)
class SeverityResult:
    si_vp: tuple[tuple[int, float], ...]  # (bus id, severity)
    si_lf: tuple[tuple[str, float], ...]  # (branch id, severity)
    sum_si_vp: float
    sum_si_lf: float
    ci: float


@lru_cache(maxsize=8)
def _output_table(config: FuzzyConfig):
    grid = np.linspace(config.severity_axis[0], config.severity_axis[1], config.grid_points)
    clipped = {m.label: m.degrees(grid) for m in config.severity_mfs}
    return grid, clipped


def membership(mf: MembershipFunction, x: float) -> float:
    return mf.degree(x)


def _infer(config: FuzzyConfig, mfs, rules, axis, x: float) -> float:
    x = min(max(x, axis[0]), axis[1])
    grid, outputs = _output_table(config)
    consequent = dict(rules)
    agg = np.zeros_like(grid)
    for mf in mfs:
        deg = mf.degree(x)
        if deg > 0.0:
            agg = np.maximum(agg, np.minimum(deg, outputs[consequent[mf.label]]))
    total = agg.sum()
    if total == 0.0:
        raise FuzzyConfigError(f"input {x} activates no rule; partition violates coverage")
    return float((grid * agg).sum() / total)


def severity_voltage(v: float, config: FuzzyConfig) -> float:
    if v <= 0.0:
        raise ValueError("voltage must be positive")
    return _infer(config, config.voltage_mfs, config.voltage_rules, config.voltage_axis, v)


def severity_lf(lf: float, config: FuzzyConfig) -> float:
    if lf < 0.0:
        raise ValueError("line index must be nonnegative")
    return _infer(config, config.lf_mfs, config.lf_rules, config.lf_axis, lf)


def criticality_index(case: Case, critical_state, config: FuzzyConfig) -> SeverityResult:
    """CI = sum of voltage severities + sum of line severities.

    Voltage severities cover every load bus; line severities cover every
    in-service branch of the scenario, lines with no delivered power
    entering at their recorded index of zero.
    """
    records = line_index_records(case, critical_state.contingency, critical_state.solution_at_critical)
    return severity_result(
        [(b.id, critical_state.solution_at_critical.v(b.id)) for b in case.load_buses()],
        records,
        config,
    )


def severity_result(
    bus_voltages: list[tuple[int, float]],
    records: list[LineIndexRecord],
    config: FuzzyConfig,
) -> SeverityResult:
    si_vp = tuple((bus, severity_voltage(v, config)) for bus, v in bus_voltages)
    si_lf = tuple((r.branch_id, severity_lf(r.lf, config)) for r in records)
    sum_vp = sum(s for _, s in si_vp)
    sum_lf = sum(s for _, s in si_lf)
    return SeverityResult(si_vp, si_lf, sum_vp, sum_lf, sum_vp + sum_lf)


def default_fuzzy_config() -> FuzzyConfig:
    """Shipped default; every breakpoint is overridable via a config file."""
    return FuzzyConfig(
        voltage_axis=(0.5, 1.1),
        voltage_mfs=(
            MembershipFunction("LV", 0.5, 0.5, 0.80, 0.95),
            MembershipFunction("NV", 0.90, 0.98, 1.02, 1.05),
            MembershipFunction("OV", 1.02, 1.05, 1.1, 1.1),
        ),
        lf_axis=(0.0, 1.2),
        lf_mfs=(
            MembershipFunction("VS", 0.0, 0.0, 0.04, 0.175),
            MembershipFunction("S", 0.04, 0.175, 0.325, 0.47),
            MembershipFunction("M", 0.325, 0.47, 0.53, 0.68),
            MembershipFunction("H", 0.53, 0.68, 0.82, 0.85),
            MembershipFunction("VH", 0.82, 0.85, 1.2, 1.2),
        ),
        severity_axis=(0.0, 100.0),
        severity_mfs=(
            MembershipFunction("VLS", 0.0, 8.0, 12.0, 20.0),
            MembershipFunction("LS", 20.0, 28.0, 32.0, 40.0),
            MembershipFunction("BS", 40.0, 48.0, 52.0, 60.0),
            MembershipFunction("AS", 60.0, 68.0, 72.0, 80.0),
            MembershipFunction("MS", 80.0, 88.0, 92.0, 100.0),
        ),
        voltage_rules=(("LV", "MS"), ("NV", "BS"), ("OV", "MS")),
        lf_rules=(("VS", "VLS"), ("S", "LS"), ("M", "BS"), ("H", "AS"), ("VH", "MS")),
        grid_points=1001,
    )


def parse_fuzzy_config(text: str) -> FuzzyConfig:
    """Line-oriented config: keyword, then fields; '#' starts a comment.

    Records: <PARTITION>_AXIS lo hi; <PARTITION> label a b c d;
    RULE_VOLTAGE input severity; RULE_LF input severity; GRID_POINTS n.
    """
    axes: dict[str, tuple[float, float]] = {}
    mfs: dict[str, list[MembershipFunction]] = {"VOLTAGE": [], "LF": [], "SEVERITY": []}
    rules: dict[str, list[tuple[str, str]]] = {"VOLTAGE": [], "LF": []}
    grid_points = 1001

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        keyword, rest = tokens[0], tokens[1:]
        where = f"line {lineno}"
        try:
            if keyword in ("VOLTAGE_AXIS", "LF_AXIS", "SEVERITY_AXIS"):
                if len(rest) != 2:
                    raise FuzzyConfigError(f"{where}: axis needs two numbers")
                axes[keyword.split("_")[0]] = (float(rest[0]), float(rest[1]))
            elif keyword in ("VOLTAGE", "LF", "SEVERITY"):
                if len(rest) != 5:
                    raise FuzzyConfigError(f"{where}: expected label and four breakpoints")
                mfs[keyword].append(
                    MembershipFunction(rest[0], float(rest[1]), float(rest[2]), float(rest[3]), float(rest[4]))
                )
            elif keyword in ("RULE_VOLTAGE", "RULE_LF"):
                if len(rest) != 2:
                    raise FuzzyConfigError(f"{where}: rule needs input and severity labels")
                rules[keyword.removeprefix("RULE_")].append((rest[0], rest[1]))
            elif keyword == "GRID_POINTS":
                if len(rest) != 1:
                    raise FuzzyConfigError(f"{where}: GRID_POINTS needs one integer")
                grid_points = int(rest[0])
            else:
                raise FuzzyConfigError(f"{where}: unknown record {keyword!r}")
        except ValueError as exc:
            if isinstance(exc, FuzzyConfigError):
                raise
            raise FuzzyConfigError(f"{where}: {exc}") from None

    for name in ("VOLTAGE", "LF", "SEVERITY"):
        if name not in axes:
            raise FuzzyConfigError(f"missing {name}_AXIS record")
    return FuzzyConfig(
        voltage_axis=axes["VOLTAGE"],
        voltage_mfs=tuple(mfs["VOLTAGE"]),
        lf_axis=axes["LF"],
        lf_mfs=tuple(mfs["LF"]),
        severity_axis=axes["SEVERITY"],
        severity_mfs=tuple(mfs["SEVERITY"]),
        voltage_rules=tuple(rules["VOLTAGE"]),
        lf_rules=tuple(rules["LF"]),
        grid_points=grid_points,
    )


def load_fuzzy_config(path) -> FuzzyConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_fuzzy_config(fh.read())


def serialize_fuzzy_config(config: FuzzyConfig) -> str:
    lines = ["# fuzzy inference configuration"]
    for name, axis, part in (
        ("VOLTAGE", config.voltage_axis, config.voltage_mfs),
        ("LF", config.lf_axis, config.lf_mfs),
        ("SEVERITY", config.severity_axis, config.severity_mfs),
    ):
        lines.append(f"{name}_AXIS {axis[0]!r} {axis[1]!r}")
        for m in part:
            lines.append(f"{name} {m.label} {m.a!r} {m.b!r} {m.c!r} {m.d!r}")
    for head, consequent in config.voltage_rules:
        lines.append(f"RULE_VOLTAGE {head} {consequent}")
    for head, consequent in config.lf_rules:
        lines.append(f"RULE_LF {head} {consequent}")
    lines.append(f"GRID_POINTS {config.grid_points}")
    return "\n".join(lines) + "\n"
