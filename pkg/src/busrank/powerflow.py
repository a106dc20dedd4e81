"""Full Newton-Raphson AC power flow and branch flow extraction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .case import Case, CaseError, build_ybus

VM_FLOOR = 0.0  # iterates must stay inside (0, 2] pu
VM_CEIL = 2.0


@dataclass(frozen=True)
class PowerFlowOptions:
    tol: float = 1e-6  # max absolute P/Q mismatch, pu
    max_iter: int = 30
    flat_start: bool = True
    trace: bool = False

    def __post_init__(self) -> None:
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass(frozen=True)
class PowerFlowSolution:
    bus_ids: tuple[int, ...]
    vm: np.ndarray  # pu magnitudes, case bus order
    va: np.ndarray  # radians
    iterations: int
    max_mismatch: float
    trace: tuple[tuple[int, float], ...] = ()

    converged = True

    def v(self, bus_id: int) -> float:
        return float(self.vm[self.bus_ids.index(bus_id)])

    def angle(self, bus_id: int) -> float:
        return float(self.va[self.bus_ids.index(bus_id)])


@dataclass(frozen=True)
class Diverged:
    reason: str  # max_iter | singular | voltage_window
    iterations: int
    last_mismatch: float
    trace: tuple[tuple[int, float], ...] = ()

    converged = False


def _schedules(case: Case, load_overrides) -> tuple[np.ndarray, np.ndarray]:
    P = np.array([b.p_gen - b.p_load for b in case.buses])
    Q = np.array([b.q_gen - b.q_load for b in case.buses])
    if load_overrides:
        load_ids = {b.id for b in case.load_buses()}
        for bus_id, (dp, dq) in load_overrides.items():
            if bus_id not in load_ids:
                raise CaseError(f"load override targets non-load bus {bus_id}")
            k = case.ordinal(bus_id)
            P[k] -= dp
            Q[k] -= dq
    return P, Q


def _index_sets(case: Case) -> tuple[np.ndarray, np.ndarray]:
    ang = [k for k, b in enumerate(case.buses) if b.kind != "slack"]
    mag = [k for k, b in enumerate(case.buses) if b.kind == "load"]
    return np.asarray(ang, dtype=np.int64), np.asarray(mag, dtype=np.int64)


def start_state(case: Case) -> tuple[np.ndarray, np.ndarray]:
    """Flat start: setpoint magnitudes where fixed, 1.0 pu elsewhere, zero angles."""
    vm = np.array([b.v_setpoint if b.v_setpoint is not None else 1.0 for b in case.buses])
    va = np.zeros(case.n)
    return vm, va


def mismatch(case: Case, ybus: np.ndarray, vm: np.ndarray, va: np.ndarray, load_overrides=None):
    """Scheduled minus injected power, full bus vectors (ΔP, ΔQ).

    Deliberately computed from the complex nodal balance S = V (Y V)*,
    a different arithmetic path from the solver's trigonometric kernels,
    so convergence certificates are an independent check.
    """
    Ps, Qs = _schedules(case, load_overrides)
    V = vm * np.exp(1j * va)
    S = V * np.conj(ybus @ V)
    return Ps - S.real, Qs - S.imag


def jacobian(case: Case, ybus: np.ndarray, vm: np.ndarray, va: np.ndarray) -> np.ndarray:
    """Reduced polar Jacobian: rows [P@non-slack; Q@load], cols [angle; magnitude]."""
    ang_idx, mag_idx = _index_sets(case)
    G, B = np.ascontiguousarray(ybus.real), np.ascontiguousarray(ybus.imag)
    P, Q = kernels.power_injections(G, B, vm, va)
    return kernels.polar_jacobian(G, B, vm, va, P, Q, ang_idx, mag_idx)


def solve(
    case: Case,
    outages=(),
    load_overrides=None,
    options: PowerFlowOptions | None = None,
    ybus: np.ndarray | None = None,
    initial: tuple[np.ndarray, np.ndarray] | None = None,
):
    """Newton-Raphson solve; returns PowerFlowSolution or Diverged.

    Divergence means: mismatch not below tol within max_iter, a singular
    Jacobian step, or an iterate magnitude leaving (0, 2] pu.
    """
    options = options or PowerFlowOptions()
    if ybus is None:
        ybus = build_ybus(case, outages)
    G, B = np.ascontiguousarray(ybus.real), np.ascontiguousarray(ybus.imag)
    Ps, Qs = _schedules(case, load_overrides)
    ang_idx, mag_idx = _index_sets(case)

    if initial is not None and not options.flat_start:
        vm, va = initial[0].copy(), initial[1].copy()
    else:
        vm, va = start_state(case)

    trace: list[tuple[int, float]] = []
    resid = np.inf
    # Exactly max_iter mismatch checks; the state after the final Newton
    # step is never re-tested. The stress search's frozen reference
    # boundaries assume this counting, so it is part of the contract.
    for it in range(options.max_iter):
        P, Q = kernels.power_injections(G, B, vm, va)
        res = np.concatenate([(Ps - P)[ang_idx], (Qs - Q)[mag_idx]])
        resid = float(np.max(np.abs(res))) if res.size else 0.0
        if options.trace:
            trace.append((it, resid))
        if resid < options.tol:
            return PowerFlowSolution(
                tuple(b.id for b in case.buses), vm, va, it, resid, tuple(trace)
            )
        J = kernels.polar_jacobian(G, B, vm, va, P, Q, ang_idx, mag_idx)
        try:
            step = np.linalg.solve(J, res)
        except np.linalg.LinAlgError:
            return Diverged("singular", it, resid, tuple(trace))
        va[ang_idx] += step[: len(ang_idx)]
        vm[mag_idx] += step[len(ang_idx):]
        if np.any(vm <= VM_FLOOR) or np.any(vm > VM_CEIL):
            return Diverged("voltage_window", it + 1, resid, tuple(trace))
    return Diverged("max_iter", options.max_iter, resid, tuple(trace))


@dataclass(frozen=True)
class BranchFlow:
    branch_id: str
    sending_bus: int
    receiving_bus: int
    p_send: float  # pu into the line at the sending end
    q_send: float
    p_recv: float  # pu delivered at the receiving end
    q_recv: float
    p_loss: float
    q_loss: float


def line_flows(case: Case, outages, solution: PowerFlowSolution) -> list[BranchFlow]:
    """π-model end flows per in-service branch, oriented so p_send >= 0."""
    outages = frozenset(outages)
    V = solution.vm * np.exp(1j * solution.va)
    flows: list[BranchFlow] = []
    for br in case.branches:
        if br.id in outages:
            continue
        i, j = case.ordinal(br.from_bus), case.ordinal(br.to_bus)
        ys = br.y_series
        # injection into the branch at each terminal, charging included
        s_from = V[i] * np.conj(ys * (V[i] - V[j]) + 1j * br.b_half * V[i])
        s_to = V[j] * np.conj(ys * (V[j] - V[i]) + 1j * br.b_half * V[j])
        if s_from.real >= s_to.real:
            send, recv = br.from_bus, br.to_bus
            s_in, s_out = s_from, s_to
        else:
            send, recv = br.to_bus, br.from_bus
            s_in, s_out = s_to, s_from
        flows.append(
            BranchFlow(
                br.id,
                send,
                recv,
                float(s_in.real),
                float(s_in.imag),
                float(-s_out.real),
                float(-s_out.imag),
                float(s_in.real + s_out.real),
                float(s_in.imag + s_out.imag),
            )
        )
    return flows
