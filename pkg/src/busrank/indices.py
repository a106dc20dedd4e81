"""Per-branch voltage-stability indices computed from a solved state.

The line transfer index compares the real power delivered at the
receiving end against the line's maximum transferable real power for
the prevailing load power factor; it approaches 1 as a line is pushed
toward its transfer limit. The quadratic-discriminant index (fvsi) is
the comparison metric used alongside it.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

from .case import Branch, Case
from .powerflow import BranchFlow, PowerFlowSolution, line_flows

LF_VARIANTS = ("sending-pf", "receiving-line")


class OrientationError(RuntimeError):
    """Receiving end exporting real power after orientation: internal bug."""


@dataclass(frozen=True)
class LineIndexRecord:
    branch_id: str
    lf: float
    fvsi: float
    phi: float  # load power-factor angle at the receiving end, radians
    theta: float  # series admittance angle, radians
    reversed_flow: bool  # receiving end absorbed no real power; lf recorded as 0


def lf_index(
    flow: BranchFlow,
    branch: Branch,
    v_sending: float,
    variant: str = "sending-pf",
    v_receiving: float | None = None,
) -> float:
    """Transfer-limit ratio for one in-service branch.

    Default form: 2 P_R (1 + cos(theta - phi)) / (V_s^2 Y_L cos phi),
    the delivered power over the maximum for the load angle phi.
    The "receiving-line" variant swaps the denominator to use the
    receiving-end voltage and the line angle instead of the load angle;
    it exists for comparison against older published tables and needs
    v_receiving.
    """
    if variant not in LF_VARIANTS:
        raise ValueError(f"unknown lf variant {variant!r}")
    y = branch.y_series
    y_mag = abs(y)
    theta = cmath.phase(y)
    p_r, q_r = flow.p_recv, flow.q_recv
    if p_r == 0.0 and q_r == 0.0:
        return 0.0
    phi = math.atan2(q_r, p_r)
    if math.cos(phi) <= 0.0:
        raise OrientationError(
            f"branch {flow.branch_id}: receiving end exports real power (phi={phi:.3f})"
        )
    num = 2.0 * p_r * (1.0 + math.cos(theta - phi))
    if variant == "sending-pf":
        return num / (v_sending**2 * y_mag * math.cos(phi))
    if v_receiving is None:
        raise ValueError("receiving-line variant requires v_receiving")
    return num / (v_receiving**2 * y_mag * math.cos(theta))


def fvsi(branch: Branch, q_recv: float, v_sending: float) -> float:
    """Quadratic-discriminant line index: 4 Z^2 Q_r / (V_s^2 X)."""
    if branch.x == 0.0:
        raise ValueError(f"branch {branch.id}: zero reactance, index undefined")
    z2 = branch.r**2 + branch.x**2
    return 4.0 * z2 * q_recv / (v_sending**2 * branch.x)


def line_index_records(
    case: Case,
    outages,
    solution: PowerFlowSolution,
    variant: str = "sending-pf",
) -> list[LineIndexRecord]:
    """Index records for every in-service branch of a converged state.

    Lightly loaded lines can absorb real power at both terminals (losses
    plus charging exceed the through-flow), which leaves no meaningful
    delivered power to ratio; such lines are recorded with lf = 0 and
    flagged instead of raising.
    """
    if variant not in LF_VARIANTS:
        raise ValueError(f"unknown lf variant {variant!r}")
    records: list[LineIndexRecord] = []
    for flow in line_flows(case, outages, solution):
        branch = case.branch(flow.branch_id)
        theta = cmath.phase(branch.y_series)
        v_s = solution.v(flow.sending_bus)
        if branch.x == 0.0:
            warnings.warn(f"branch {branch.id}: zero reactance, fvsi skipped", stacklevel=2)
            fv = 0.0
        else:
            fv = fvsi(branch, flow.q_recv, v_s)
        if flow.p_recv <= 0.0:
            phi = math.atan2(flow.q_recv, flow.p_recv) if (flow.p_recv, flow.q_recv) != (0.0, 0.0) else 0.0
            records.append(LineIndexRecord(branch.id, 0.0, fv, phi, theta, True))
            continue
        lf = lf_index(flow, branch, v_s, variant, solution.v(flow.receiving_bus))
        records.append(
            LineIndexRecord(branch.id, lf, fv, math.atan2(flow.q_recv, flow.p_recv), theta, False)
        )
    return records


def bus_fvsi(records: list[LineIndexRecord]) -> float:
    """Scenario-level scalar: the worst line index at the critical state."""
    return max((r.fvsi for r in records), default=0.0)


def max_lf(records: list[LineIndexRecord]) -> float:
    return max((r.lf for r in records), default=0.0)
