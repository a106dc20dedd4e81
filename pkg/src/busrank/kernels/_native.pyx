# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: C loops for the solver hot path, same contract as _pure."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

BACKEND = "native"


def power_injections(double[:, ::1] G, double[:, ::1] B,
                     double[::1] vm, double[::1] va):
    cdef Py_ssize_t n = vm.shape[0]
    cdef cnp.ndarray[double, ndim=1] P = np.zeros(n)
    cdef cnp.ndarray[double, ndim=1] Q = np.zeros(n)
    cdef double[::1] Pv = P
    cdef double[::1] Qv = Q
    cdef Py_ssize_t i, j
    cdef double dt, ct, st, acc_p, acc_q
    for i in range(n):
        acc_p = 0.0
        acc_q = 0.0
        for j in range(n):
            dt = va[i] - va[j]
            ct = cos(dt)
            st = sin(dt)
            acc_p += vm[j] * (G[i, j] * ct + B[i, j] * st)
            acc_q += vm[j] * (G[i, j] * st - B[i, j] * ct)
        Pv[i] = vm[i] * acc_p
        Qv[i] = vm[i] * acc_q
    return P, Q


def polar_jacobian(double[:, ::1] G, double[:, ::1] B,
                   double[::1] vm, double[::1] va,
                   double[::1] P, double[::1] Q,
                   long[::1] ang_idx, long[::1] mag_idx):
    cdef Py_ssize_t na = ang_idx.shape[0]
    cdef Py_ssize_t nm = mag_idx.shape[0]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((na + nm, na + nm))
    cdef double[:, ::1] M = out
    cdef Py_ssize_t r, c
    cdef long i, j
    cdef double dt, ct, st, gc_bs, gs_bc

    for r in range(na):
        i = ang_idx[r]
        for c in range(na):          # dP/dva block
            j = ang_idx[c]
            if i == j:
                M[r, c] = -Q[i] - B[i, i] * vm[i] * vm[i]
            else:
                dt = va[i] - va[j]
                M[r, c] = vm[i] * vm[j] * (G[i, j] * sin(dt) - B[i, j] * cos(dt))
        for c in range(nm):          # dP/dvm block
            j = mag_idx[c]
            if i == j:
                M[r, na + c] = P[i] / vm[i] + G[i, i] * vm[i]
            else:
                dt = va[i] - va[j]
                M[r, na + c] = vm[i] * (G[i, j] * cos(dt) + B[i, j] * sin(dt))
    for r in range(nm):
        i = mag_idx[r]
        for c in range(na):          # dQ/dva block
            j = ang_idx[c]
            if i == j:
                M[na + r, c] = P[i] - G[i, i] * vm[i] * vm[i]
            else:
                dt = va[i] - va[j]
                M[na + r, c] = -vm[i] * vm[j] * (G[i, j] * cos(dt) + B[i, j] * sin(dt))
        for c in range(nm):          # dQ/dvm block
            j = mag_idx[c]
            if i == j:
                M[na + r, na + c] = Q[i] / vm[i] - B[i, i] * vm[i]
            else:
                dt = va[i] - va[j]
                M[na + r, na + c] = vm[i] * (G[i, j] * sin(dt) - B[i, j] * cos(dt))
    return out
