"""Reference kernels: vectorized numpy implementations of the solver hot loops."""

from __future__ import annotations

import numpy as np

BACKEND = "pure"


def power_injections(G: np.ndarray, B: np.ndarray, vm: np.ndarray, va: np.ndarray):
    """Polar-form bus injections.

    P_i = Vm_i sum_j Vm_j (G_ij cos t_ij + B_ij sin t_ij)
    Q_i = Vm_i sum_j Vm_j (G_ij sin t_ij - B_ij cos t_ij),  t_ij = va_i - va_j
    """
    dtheta = va[:, None] - va[None, :]
    ct = np.cos(dtheta)
    st = np.sin(dtheta)
    vv = vm[:, None] * vm[None, :]
    P = np.sum(vv * (G * ct + B * st), axis=1)
    Q = np.sum(vv * (G * st - B * ct), axis=1)
    return P, Q


def polar_jacobian(
    G: np.ndarray,
    B: np.ndarray,
    vm: np.ndarray,
    va: np.ndarray,
    P: np.ndarray,
    Q: np.ndarray,
    ang_idx: np.ndarray,
    mag_idx: np.ndarray,
) -> np.ndarray:
    """Reduced Newton matrix: rows [dP@ang_idx; dQ@mag_idx], cols [va@ang_idx; vm@mag_idx]."""
    dtheta = va[:, None] - va[None, :]
    ct = np.cos(dtheta)
    st = np.sin(dtheta)
    vv = vm[:, None] * vm[None, :]
    gc_bs = G * ct + B * st
    gs_bc = G * st - B * ct
    diag = np.arange(len(vm))

    H = vv * gs_bc  # dP/dva
    H[diag, diag] = -Q - B.diagonal() * vm**2
    N = vm[:, None] * gc_bs  # dP/dvm
    N[diag, diag] = P / vm + G.diagonal() * vm
    J = -vv * gc_bs  # dQ/dva
    J[diag, diag] = P - G.diagonal() * vm**2
    L = vm[:, None] * gs_bc  # dQ/dvm
    L[diag, diag] = Q / vm - B.diagonal() * vm

    top = np.hstack([H[np.ix_(ang_idx, ang_idx)], N[np.ix_(ang_idx, mag_idx)]])
    bot = np.hstack([J[np.ix_(mag_idx, ang_idx)], L[np.ix_(mag_idx, mag_idx)]])
    return np.vstack([top, bot])
