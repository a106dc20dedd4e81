"""Network data model: buses, branches, case files, Y-bus, connectivity."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BUS_KINDS = ("slack", "generator", "load")


class CaseError(ValueError):
    """Raised for malformed or inconsistent case documents."""


@dataclass(frozen=True)
class Bus:
    id: int
    kind: str
    v_setpoint: float | None  # pu, slack/generator only
    p_gen: float
    q_gen: float
    p_load: float
    q_load: float

    def __post_init__(self) -> None:
        if self.id <= 0:
            raise CaseError(f"bus id must be a positive integer, got {self.id}")
        if self.kind not in BUS_KINDS:
            raise CaseError(f"bus {self.id}: unknown kind {self.kind!r}")
        if self.kind in ("slack", "generator"):
            if self.v_setpoint is None or not np.isfinite(self.v_setpoint) or self.v_setpoint <= 0:
                raise CaseError(f"bus {self.id}: {self.kind} bus needs v_setpoint > 0")
        for name in ("p_gen", "q_gen", "p_load", "q_load"):
            if not np.isfinite(getattr(self, name)):
                raise CaseError(f"bus {self.id}: non-finite {name}")


@dataclass(frozen=True)
class Branch:
    id: str
    from_bus: int
    to_bus: int
    r: float
    x: float
    b_half: float  # half line-charging susceptance, pu

    def __post_init__(self) -> None:
        if self.from_bus == self.to_bus:
            raise CaseError(f"branch {self.id}: self loop at bus {self.from_bus}")
        if abs(complex(self.r, self.x)) == 0.0:
            raise CaseError(f"branch {self.id}: zero series impedance")

    @property
    def y_series(self) -> complex:
        return 1.0 / complex(self.r, self.x)


@dataclass(frozen=True)
class Case:
    base_mva: float
    buses: tuple[Bus, ...]
    branches: tuple[Branch, ...]
    _index: dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.base_mva <= 0:
            raise CaseError(f"base_mva must be positive, got {self.base_mva}")
        ids = [b.id for b in self.buses]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise CaseError(f"duplicate bus id {dup[0]}")
        slacks = [b.id for b in self.buses if b.kind == "slack"]
        if len(slacks) != 1:
            raise CaseError("multiple slack" if len(slacks) > 1 else "missing slack")
        bids = [br.id for br in self.branches]
        if len(set(bids)) != len(bids):
            dup = sorted({i for i in bids if bids.count(i) > 1})
            raise CaseError(f"duplicate branch id {dup[0]!r}")
        known = set(ids)
        for br in self.branches:
            for end in (br.from_bus, br.to_bus):
                if end not in known:
                    raise CaseError(f"branch {br.id}: unknown bus {end}")
        object.__setattr__(self, "_index", {b.id: k for k, b in enumerate(self.buses)})

    @property
    def n(self) -> int:
        return len(self.buses)

    def ordinal(self, bus_id: int) -> int:
        try:
            return self._index[bus_id]
        except KeyError:
            raise CaseError(f"unknown bus {bus_id}") from None

    @property
    def slack(self) -> Bus:
        return next(b for b in self.buses if b.kind == "slack")

    def load_buses(self) -> tuple[Bus, ...]:
        return tuple(b for b in self.buses if b.kind == "load")

    def branch(self, branch_id: str) -> Branch:
        for br in self.branches:
            if br.id == branch_id:
                return br
        raise CaseError(f"unknown branch {branch_id!r}")


def _parse_float(token: str, where: str) -> float:
    # bit-exact decimal parsing; float() never consults the locale
    try:
        return float(token)
    except ValueError:
        raise CaseError(f"{where}: malformed number {token!r}") from None


def parse_case(text: str) -> Case:
    """Parse the line-oriented case format into a validated Case."""
    base_mva: float | None = None
    buses: list[Bus] = []
    branches: list[Branch] = []
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0].upper()
        where = f"line {lineno}"
        if head == "BASE_MVA":
            if len(tokens) != 2:
                raise CaseError(f"{where}: BASE_MVA takes one value")
            base_mva = _parse_float(tokens[1], where)
            continue
        if head in ("BUS", "BRANCH") and len(tokens) == 1:
            section = head
            continue
        if section == "BUS":
            if len(tokens) != 7:
                raise CaseError(f"{where}: BUS record needs 7 fields, got {len(tokens)}")
            try:
                bus_id = int(tokens[0])
            except ValueError:
                raise CaseError(f"{where}: malformed bus id {tokens[0]!r}") from None
            kind = tokens[1].lower()
            vset = None if tokens[2] == "-" else _parse_float(tokens[2], where)
            nums = [_parse_float(t, where) for t in tokens[3:7]]
            try:
                buses.append(Bus(bus_id, kind, vset, *nums))
            except CaseError as exc:
                raise CaseError(f"{where}: {exc}") from None
        elif section == "BRANCH":
            if len(tokens) != 6:
                raise CaseError(f"{where}: BRANCH record needs 6 fields, got {len(tokens)}")
            try:
                ends = [int(tokens[1]), int(tokens[2])]
            except ValueError:
                raise CaseError(f"{where}: malformed bus id in branch {tokens[0]!r}") from None
            nums = [_parse_float(t, where) for t in tokens[3:6]]
            try:
                branches.append(Branch(tokens[0], ends[0], ends[1], *nums))
            except CaseError as exc:
                raise CaseError(f"{where}: {exc}") from None
        else:
            raise CaseError(f"{where}: record outside any section: {line!r}")
    if base_mva is None:
        raise CaseError("missing BASE_MVA")
    return Case(base_mva, tuple(buses), tuple(branches))


def serialize_case(case: Case) -> str:
    """Inverse of parse_case; round trips to an identical Case."""
    out = [f"BASE_MVA {case.base_mva!r}", "BUS"]
    for b in case.buses:
        vs = "-" if b.v_setpoint is None else repr(b.v_setpoint)
        out.append(f"{b.id} {b.kind} {vs} {b.p_gen!r} {b.q_gen!r} {b.p_load!r} {b.q_load!r}")
    out.append("BRANCH")
    for br in case.branches:
        out.append(f"{br.id} {br.from_bus} {br.to_bus} {br.r!r} {br.x!r} {br.b_half!r}")
    return "\n".join(out) + "\n"


def load_case(path: str) -> Case:
    with open(path, encoding="utf-8") as fh:
        return parse_case(fh.read())


def _check_outages(case: Case, outages) -> frozenset[str]:
    outages = frozenset(outages)
    known = {br.id for br in case.branches}
    for oid in sorted(outages):
        if oid not in known:
            raise CaseError(f"unknown outage id {oid!r}")
    return outages


def build_ybus(case: Case, outages=()) -> np.ndarray:
    """Standard Y-bus over in-service branches, charging on the diagonal."""
    outages = _check_outages(case, outages)
    n = case.n
    Y = np.zeros((n, n), dtype=complex)
    for br in case.branches:
        if br.id in outages:
            continue
        i, j = case.ordinal(br.from_bus), case.ordinal(br.to_bus)
        ys = br.y_series
        Y[i, i] += ys + 1j * br.b_half
        Y[j, j] += ys + 1j * br.b_half
        Y[i, j] -= ys
        Y[j, i] -= ys
    return Y


@dataclass(frozen=True)
class Connectivity:
    connected: bool
    components: tuple[tuple[int, ...], ...]  # bus ids, sorted inside each component


def check_connectivity(case: Case, outages=()) -> Connectivity:
    """Reachability over in-service branches; connected iff one component holds every bus."""
    outages = _check_outages(case, outages)
    adj: dict[int, set[int]] = {b.id: set() for b in case.buses}
    for br in case.branches:
        if br.id in outages:
            continue
        adj[br.from_bus].add(br.to_bus)
        adj[br.to_bus].add(br.from_bus)
    seen: set[int] = set()
    components: list[tuple[int, ...]] = []
    for start in sorted(adj):
        if start in seen:
            continue
        stack, comp = [start], set()
        while stack:
            node = stack.pop()
            if node in comp:
                continue
            comp.add(node)
            stack.extend(adj[node] - comp)
        seen |= comp
        components.append(tuple(sorted(comp)))
    return Connectivity(len(components) == 1, tuple(components))
