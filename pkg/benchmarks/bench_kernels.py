"""Compiled vs reference kernels, plus one end-to-end workload per backend.

Run: python benchmarks/bench_kernels.py [--repeat N]
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from holocurv import _kernels_py as ref

try:
    from holocurv import _kernels as fast
except ImportError:
    fast = None

WORKLOAD = """
import time
from fractions import Fraction
from holocurv.algebraic import AlgCurve, vertices
from holocurv.polysolve import MPoly
from holocurv.surface import SurfacePatch, brioschi_K
import numpy as np
rng = np.random.default_rng(0)
terms = {(i, j): Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6))) for i in range(4) for j in range(4 - i)}
t0 = time.perf_counter()
vertices(AlgCurve(MPoly(terms, exact=True)))
patch = SurfacePatch.from_monge("(2*z1^2 + 3*z2^2)/2 + z1^3 - z1*z2^2")
for q in rng.normal(size=(200, 2)) * 0.3:
    brioschi_K(patch, q)
print(time.perf_counter() - t0)
"""


def _cases(rng):
    a1 = rng.normal(size=7) + 1j * rng.normal(size=7)
    b1 = rng.normal(size=7) + 1j * rng.normal(size=7)
    a2 = np.ascontiguousarray(rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
    b2 = np.ascontiguousarray(rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
    poly = rng.normal(size=25) + 1j * rng.normal(size=25)
    z0 = np.exp(2j * np.pi * np.arange(24) / 24 + 0.4) * 1.5
    return {
        "mul1 (order 6)": lambda m: m.mul1(a1, b1),
        "mul2 (order 5)": lambda m: m.mul2(a2, b2),
        "horner (deg 24)": lambda m: m.horner(poly, 0.3 + 0.2j),
        "aberth_sweep (deg 24)": lambda m: m.aberth_sweep(poly, z0.copy()),
    }


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=2000)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(1)
    print(f"{'kernel':24s} {'python us':>12s} {'cython us':>12s} {'speedup':>8s}")
    for name, fn in _cases(rng).items():
        tp = min(timeit.repeat(lambda: fn(ref), number=args.repeat, repeat=3)) / args.repeat * 1e6
        if fast is None:
            print(f"{name:24s} {tp:12.2f} {'n/a':>12s}")
            continue
        tc = min(timeit.repeat(lambda: fn(fast), number=args.repeat, repeat=3)) / args.repeat * 1e6
        print(f"{name:24s} {tp:12.2f} {tc:12.2f} {tp / tc:8.1f}x")
    print("\nend-to-end (cubic vertices + 200 Brioschi evaluations):")
    for label, env in (("python", {"HOLOCURV_PURE_PYTHON": "1"}), ("cython", {})):
        e = {k: v for k, v in os.environ.items() if k != "HOLOCURV_PURE_PYTHON"}
        e.update(env)
        out = subprocess.run([sys.executable, "-c", WORKLOAD], env=e, capture_output=True, text=True, check=True)
        print(f"  {label:8s} {float(out.stdout):.3f} s")


if __name__ == "__main__":
    main()
