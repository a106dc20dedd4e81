#!/usr/bin/env python3
"""Time the pure-Python kernels against the compiled extension.

Micro level: repeated injection and Jacobian evaluations on perturbed
fixture states, both backends in one process. Macro level: a full
critical-load search per backend, each in a subprocess so the import
time selection (BUSRANK_KERNEL) picks the right implementation.
"""

from __future__ import annotations

import argparse
import os
import statistics
import subprocess
import sys
import time

import numpy as np

from busrank.case import build_ybus
from busrank.fixtures import stagg5_case
from busrank.kernels import _pure
from busrank.powerflow import _index_sets, start_state

try:
    from busrank.kernels import _native
except ImportError:
    _native = None

MACRO_SNIPPET = """
import time
from busrank.fixtures import stagg5_case
from busrank.stress import find_critical_load
from busrank import kernels
case = stagg5_case()
find_critical_load(case, (), 3)  # warm caches
t0 = time.perf_counter()
for _ in range({reps}):
    find_critical_load(case, (), 3)
dt = (time.perf_counter() - t0) / {reps}
print(f"{{kernels.active_backend()}} {{dt:.6f}}")
"""


def micro(repeat: int) -> None:
    case = stagg5_case()
    ybus = build_ybus(case)
    G = np.ascontiguousarray(ybus.real)
    B = np.ascontiguousarray(ybus.imag)
    ang_idx, mag_idx = _index_sets(case)
    rng = np.random.default_rng(7)
    vm0, va0 = start_state(case)
    states = [
        (vm0 + rng.uniform(-0.2, 0.1, case.n), va0 + rng.uniform(-0.4, 0.4, case.n))
        for _ in range(100)
    ]

    backends = [("pure", _pure)] + ([("native", _native)] if _native else [])
    rows = []
    for name, mod in backends:
        for label, fn in (
            ("injections", lambda m=mod: [m.power_injections(G, B, vm, va) for vm, va in states]),
            (
                "jacobian",
                lambda m=mod: [
                    m.polar_jacobian(G, B, vm, va, *m.power_injections(G, B, vm, va), ang_idx, mag_idx)
                    for vm, va in states
                ],
            ),
        ):
            fn()  # warm up
            samples = []
            for _ in range(repeat):
                t0 = time.perf_counter()
                fn()
                samples.append((time.perf_counter() - t0) / len(states))
            rows.append((name, label, min(samples), statistics.median(samples)))

    print(f"{'backend':<8} {'kernel':<11} {'best (us)':>10} {'median (us)':>12}")
    for name, label, best, med in rows:
        print(f"{name:<8} {label:<11} {best * 1e6:>10.2f} {med * 1e6:>12.2f}")
    if _native:
        for label in ("injections", "jacobian"):
            pure_best = next(r[2] for r in rows if r[0] == "pure" and r[1] == label)
            native_best = next(r[2] for r in rows if r[0] == "native" and r[1] == label)
            print(f"native speedup on {label}: {pure_best / native_best:.2f}x")


def macro(reps: int) -> None:
    print(f"\nfull critical-load search (base network, bus 3), {reps} runs each:")
    for backend in ("pure", "native") if _native else ("pure",):
        env = dict(os.environ, BUSRANK_KERNEL=backend)
        proc = subprocess.run(
            [sys.executable, "-c", MACRO_SNIPPET.format(reps=reps)],
            capture_output=True,
            text=True,
            env=env,
        )
        if proc.returncode != 0:
            print(f"{backend}: failed\n{proc.stderr}", file=sys.stderr)
            continue
        name, dt = proc.stdout.split()
        print(f"{name:<8} {float(dt) * 1e3:>8.2f} ms per search")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=30, help="micro-benchmark repetitions")
    parser.add_argument("--macro-reps", type=int, default=5, help="full searches per backend")
    parser.add_argument("--skip-macro", action="store_true")
    args = parser.parse_args()
    if _native is None:
        print("compiled kernels unavailable; timing pure backend only", file=sys.stderr)
    micro(args.repeat)
    if not args.skip_macro:
        macro(args.macro_reps)


if __name__ == "__main__":
    main()
