"""Newton-Raphson solver behaviour on the bundled case and small synthetics."""
from __future__ import annotations

import numpy as np
import pytest

from busrank import Diverged, PowerFlowOptions, line_flows, parse_case, solve
from busrank.case import CaseError, build_ybus
from busrank.powerflow import jacobian, mismatch, start_state


@pytest.fixture(scope="module")
def base_solution(case):
    sol = solve(case)
    assert sol.converged
    return sol


def test_base_case_load_voltages(base_solution):
    # Reference study operating point for the three load buses.
    assert base_solution.v(3) == pytest.approx(0.987, abs=1e-3)
    assert base_solution.v(4) == pytest.approx(0.984, abs=1e-3)
    assert base_solution.v(5) == pytest.approx(0.972, abs=1e-3)


def test_base_case_shape(base_solution, case):
    assert base_solution.bus_ids == (1, 2, 3, 4, 5)
    assert base_solution.iterations <= 5
    assert base_solution.max_mismatch < 1e-6
    assert base_solution.angle(1) == 0.0
    assert base_solution.v(1) == 1.06
    assert base_solution.v(2) == 1.00
    # Every angle lags the slack in this all-load-flow case.
    assert all(base_solution.angle(b) < 0 for b in (2, 3, 4, 5))


def test_solution_is_deterministic(case):
    a, b = solve(case), solve(case)
    assert np.array_equal(a.vm, b.vm)
    assert np.array_equal(a.va, b.va)
    assert a.iterations == b.iterations


def test_certificate_holds(base_solution, case):
    # Recheck convergence through the complex nodal balance, an arithmetic
    # path independent of the solver's trigonometric kernels.
    ybus = build_ybus(case)
    dp, dq = mismatch(case, ybus, base_solution.vm, base_solution.va)
    ang = [k for k, b in enumerate(case.buses) if b.kind != "slack"]
    mag = [k for k, b in enumerate(case.buses) if b.kind == "load"]
    assert np.abs(dp[ang]).max() < 1e-6
    assert np.abs(dq[mag]).max() < 1e-6


def test_trivial_slack_only_network():
    sol = solve(parse_case("BASE_MVA 100.0\nBUS\n1 slack 1.02 0 0 0 0\nBRANCH\n"))
    assert sol.converged
    assert sol.iterations == 0
    assert sol.v(1) == 1.02


def test_two_bus_analytic():
    # Slack feeding one load over a lossless-charging line; cross-check the
    # solved voltage against the closed-form quadratic for this circuit.
    text = "BASE_MVA 100.0\nBUS\n1 slack 1.0 0 0 0 0\n2 load - 0 0 0.3 0.1\nBRANCH\n1-2 1 2 0.0 0.1 0.0\n"
    case2 = parse_case(text)
    sol = solve(case2)
    assert sol.converged
    # V2 solves V2^4 + (2 q x - 1) V2^2 + x^2 (p^2 + q^2) = 0 for a pure reactance x.
    p, q, x = 0.3, 0.1, 0.1
    b = 2 * q * x - 1
    v2 = np.sqrt((-b + np.sqrt(b * b - 4 * x * x * (p * p + q * q))) / 2)
    assert sol.v(2) == pytest.approx(v2, abs=1e-9)


def test_overload_diverges(case):
    result = solve(case, load_overrides={5: (0.0, 8.0)})
    assert isinstance(result, Diverged)
    assert result.reason in {"max_iter", "singular", "voltage_window"}
    assert not result.converged


def test_max_iter_reason(case):
    # One iteration cannot close the base-case mismatch from flat start.
    result = solve(case, options=PowerFlowOptions(max_iter=1))
    assert isinstance(result, Diverged)
    assert result.reason == "max_iter"
    assert result.iterations == 1


def test_override_validation(case):
    with pytest.raises(CaseError, match="non-load bus"):
        solve(case, load_overrides={2: (0.0, 1.0)})


def test_options_validation():
    with pytest.raises(ValueError, match="tol"):
        PowerFlowOptions(tol=0.0)
    with pytest.raises(ValueError, match="max_iter"):
        PowerFlowOptions(max_iter=0)


def test_trace_records_residuals(case):
    sol = solve(case, options=PowerFlowOptions(trace=True))
    assert sol.converged
    assert len(sol.trace) == sol.iterations + 1
    residuals = [r for _, r in sol.trace]
    # Newton converges monotonically from flat start here.
    assert residuals == sorted(residuals, reverse=True)
    assert residuals[-1] < 1e-6


def test_warm_start_converges_faster(case):
    cold = solve(case, load_overrides={3: (0.0, 1.0)})
    warm = solve(
        case,
        load_overrides={3: (0.0, 1.0)},
        options=PowerFlowOptions(flat_start=False),
        initial=(cold.vm, cold.va),
    )
    assert warm.converged
    assert warm.iterations == 0  # restarting at the solution needs no steps
    cold_nearby = solve(
        case,
        load_overrides={3: (0.0, 1.1)},
        options=PowerFlowOptions(flat_start=False),
        initial=(cold.vm, cold.va),
    )
    fresh = solve(case, load_overrides={3: (0.0, 1.1)})
    assert cold_nearby.converged
    assert cold_nearby.iterations <= fresh.iterations
    np.testing.assert_allclose(cold_nearby.vm, fresh.vm, atol=1e-8)


def test_voltage_monotone_under_reactive_stress(case):
    # Load-bus voltage must not rise as its own reactive draw grows.
    previous = None
    for q in (0.0, 0.5, 1.0, 1.5, 2.0):
        sol = solve(case, load_overrides={5: (0.0, q)})
        assert sol.converged
        if previous is not None:
            assert sol.v(5) <= previous + 1e-12
        previous = sol.v(5)


def test_jacobian_shape_and_structure(case):
    ybus = build_ybus(case)
    vm, va = start_state(case)
    j = jacobian(case, ybus, vm, va)
    # 4 angle unknowns + 3 magnitude unknowns for this case.
    assert j.shape == (7, 7)
    assert np.isfinite(j).all()


def test_branch_flow_invariants(base_solution, case):
    flows = line_flows(case, (), base_solution)
    assert [f.branch_id for f in flows] == [b.id for b in case.branches]
    for f in flows:
        assert f.p_send >= f.p_recv
        assert f.p_loss == pytest.approx(f.p_send - f.p_recv)
        assert f.q_loss == pytest.approx(f.q_send - f.q_recv)
        assert f.p_loss >= -1e-12  # series resistance only dissipates
        assert {f.sending_bus, f.receiving_bus} == {case.branch(f.branch_id).from_bus, case.branch(f.branch_id).to_bus}


def test_branch_flow_power_balance(base_solution, case):
    # Total generation minus load equals total series loss.
    flows = line_flows(case, (), base_solution)
    total_loss = sum(f.p_loss for f in flows)
    ybus = build_ybus(case)
    V = base_solution.vm * np.exp(1j * base_solution.va)
    injections = (V * np.conj(ybus @ V)).real
    assert injections.sum() == pytest.approx(total_loss, abs=1e-9)


def test_outage_changes_solution(case):
    intact = solve(case)
    outaged = solve(case, outages=("1-2",))
    assert outaged.converged
    assert outaged.v(3) < intact.v(3)
    flows = line_flows(case, ("1-2",), outaged)
    assert "1-2" not in [f.branch_id for f in flows]
    assert len(flows) == 6
