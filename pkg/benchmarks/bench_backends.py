#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Times one full-lattice collision sweep per mode and backend and prints a
table with the speedup. Run from the repository root:

    python benchmarks/bench_backends.py [--length N] [--qubits B] [--members M]
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from qlgas import complexlin, kernels  # noqa: E402


def best_of(fn, repeats=5):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--length", type=int, default=4096)
    parser.add_argument("--qubits", type=int, default=2)
    parser.add_argument("--members", type=int, default=2000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    f = np.ascontiguousarray(rng.uniform(0.0, 1.0, (args.length, args.qubits)))
    u = np.ascontiguousarray(complexlin.random_unitary(1 << args.qubits, rng))

    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("note: compiled extension not built; timing the fallback only")

    sweeps = {
        "pure": lambda k: k.collide_pure(f, u),
        "mixed": lambda k: k.collide_mixed(f, u),
        "ensemble": lambda k: k.collide_ensemble(f, u, args.members, 42, 0),
    }

    print(f"L={args.length} b={args.qubits} members={args.members} "
          f"(best of {args.repeats})")
    header = f"{'sweep':<10}" + "".join(f"{name:>14}" for name in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for name, sweep in sweeps.items():
        row = f"{name:<10}"
        timings = {}
        for backend in backends:
            kern = kernels.get(backend)
            timings[backend] = best_of(lambda: sweep(kern), args.repeats)
            row += f"{timings[backend] * 1e3:>11.2f} ms"
        if "compiled" in timings and "python" in timings:
            row += f"{timings['python'] / timings['compiled']:>9.1f}x"
        print(row)

    # cross-check while both backends are loaded
    if len(backends) == 2:
        for name, sweep in sweeps.items():
            a = sweep(kernels.get("python"))
            b = sweep(kernels.get("compiled"))
            err = float(np.abs(np.asarray(a) - np.asarray(b)).max())
            tag = "bit-identical" if err == 0.0 else f"max |diff| {err:.2e}"
            print(f"agreement {name}: {tag}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
