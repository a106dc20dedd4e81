"""Case parsing, validation, admittance assembly, and connectivity."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from busrank import CaseError, build_ybus, check_connectivity, parse_case, serialize_case
from busrank.fixtures import stagg5_case

MINIMAL = """
BASE_MVA 100.0
BUS
1 slack 1.05 0 0 0 0
2 load - 0 0 0.5 0.2
BRANCH
1-2 1 2 0.01 0.05 0.0
"""


def test_fixture_shape(case):
    assert case.n == 5
    assert case.base_mva == 100.0
    assert [b.id for b in case.load_buses()] == [3, 4, 5]
    assert case.slack.id == 1
    assert len(case.branches) == 7
    assert case.branch("2-5").x == 0.12


def test_round_trip(case):
    again = parse_case(serialize_case(case))
    assert again == case


def test_comments_and_blank_lines_ignored():
    text = "# header\n\nBASE_MVA 100.0\nBUS\n# note\n1 slack 1.0 0 0 0 0\n2 load - 0 0 0.1 0.1\nBRANCH\n1-2 1 2 0.01 0.05 0\n"
    case = parse_case(text)
    assert case.n == 2


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda t: t.replace("2 load", "1 load"), "duplicate bus"),
        (lambda t: t.replace("1 slack 1.05", "1 load -"), "missing slack"),
        (lambda t: t.replace("2 load -", "2 slack 1.0"), "multiple slack"),
        (lambda t: t.replace("1-2 1 2", "1-2 1 9"), "unknown bus"),
        (lambda t: t.replace("0.01 0.05", "0.0 0.0"), "zero series impedance"),
        (lambda t: t.replace("1-2 1 2", "1-2 2 2"), "self loop"),
        (lambda t: t.replace("0.5 0.2", "0.5 oops"), "malformed number"),
        (lambda t: t.replace("BASE_MVA 100.0", "BASE_MVA -1"), "base_mva must be positive"),
        (lambda t: t.replace("BASE_MVA 100.0\n", ""), "missing BASE_MVA"),
        (lambda t: t.replace("BUS\n", ""), "outside any section"),
        (lambda t: t + "1-2b 1 2 0.01 0.05\n", "needs 6 fields"),
        (lambda t: t + "1-2 2 1 0.02 0.04 0.0\n", "duplicate branch"),
    ],
)
def test_rejects_malformed_case(mutate, message):
    with pytest.raises(CaseError, match=message):
        parse_case(mutate(MINIMAL))


def test_unknown_lookups(case):
    with pytest.raises(CaseError, match="unknown bus"):
        case.ordinal(9)
    with pytest.raises(CaseError, match="unknown branch"):
        case.branch("9-9")


def test_generator_needs_setpoint():
    with pytest.raises(CaseError, match="needs v_setpoint"):
        parse_case(MINIMAL.replace("2 load -", "2 generator -"))


def test_ybus_structure(case):
    y = build_ybus(case)
    assert y.shape == (5, 5)
    assert np.allclose(y, y.T)
    # Off-diagonal of a connected pair is the negated series admittance.
    br = case.branch("1-2")
    ys = 1.0 / complex(br.r, br.x)
    assert y[0, 1] == pytest.approx(-ys)
    # Diagonal carries the shunt charging: row sum equals the total b_half at the bus.
    shunt = sum(1j * b.b_half for b in case.branches if 1 in (b.from_bus, b.to_bus))
    assert y[0].sum() == pytest.approx(shunt)


def test_ybus_outage_superposition(case):
    # Removing a branch subtracts exactly its own contribution.
    full = build_ybus(case)
    reduced = build_ybus(case, ("2-5",))
    delta = full - reduced
    br = case.branch("2-5")
    ys = 1.0 / complex(br.r, br.x)
    i, j = case.ordinal(2), case.ordinal(5)
    assert delta[i, j] == pytest.approx(-ys)
    assert delta[i, i] == pytest.approx(ys + 1j * br.b_half)
    untouched = np.ones(5, bool)
    untouched[[i, j]] = False
    assert np.all(delta[np.ix_(untouched, untouched)] == 0)


def test_ybus_unknown_outage(case):
    with pytest.raises(CaseError, match="unknown outage"):
        build_ybus(case, ("9-9",))


def test_connectivity_intact(case):
    conn = check_connectivity(case)
    assert conn.connected
    assert conn.components == ((1, 2, 3, 4, 5),)


def test_connectivity_islanding(case):
    conn = check_connectivity(case, ("1-2", "1-3"))
    assert not conn.connected
    assert conn.components == ((1,), (2, 3, 4, 5))


@st.composite
def random_cases(draw):
    n = draw(st.integers(min_value=2, max_value=6))
    buses = []
    for i in range(1, n + 1):
        kind = "slack" if i == 1 else draw(st.sampled_from(["load", "generator"]))
        setp = draw(st.floats(0.9, 1.1)) if kind != "load" else None
        finite = st.floats(-2.0, 2.0, allow_nan=False)
        buses.append((i, kind, setp, draw(finite), draw(finite), draw(finite), draw(finite)))
    # A spanning chain keeps every case connected, then optional extras.
    pairs = [(i, i + 1) for i in range(1, n)]
    extras = draw(st.lists(st.tuples(st.integers(1, n), st.integers(1, n)), max_size=4))
    for a, b in extras:
        if a != b and (a, b) not in pairs and (b, a) not in pairs:
            pairs.append((a, b))
    lines = ["BASE_MVA 100.0", "BUS"]
    for i, kind, setp, pg, qg, pl, ql in buses:
        lines.append(f"{i} {kind} {setp if setp is not None else '-'} {pg!r} {qg!r} {pl!r} {ql!r}")
    lines.append("BRANCH")
    for a, b in pairs:
        r = draw(st.floats(0.001, 0.2))
        x = draw(st.floats(0.001, 0.5))
        bh = draw(st.floats(0.0, 0.1))
        lines.append(f"{a}-{b} {a} {b} {r!r} {x!r} {bh!r}")
    return "\n".join(lines) + "\n"


@settings(max_examples=40, deadline=None)
@given(random_cases())
def test_round_trip_random(text):
    case = parse_case(text)
    assert parse_case(serialize_case(case)) == case
    y = build_ybus(case)
    assert np.allclose(y, y.T)
    assert np.isfinite(y).all()


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_connectivity_monotone_in_outages(data):
    # Removing more branches never reconnects anything.
    case = stagg5_case()
    ids = [b.id for b in case.branches]
    small = data.draw(st.sets(st.sampled_from(ids), max_size=3))
    big = small | data.draw(st.sets(st.sampled_from(ids), max_size=3))
    n_small = len(check_connectivity(case, tuple(small)).components)
    n_big = len(check_connectivity(case, tuple(big)).components)
    assert n_big >= n_small
