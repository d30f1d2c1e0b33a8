"""Time the compiled and pure-Python Dormand-Prince kernels on the same problems.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import math
import timeit

import numpy as np

from cubicwave import _dopri_py

try:
    from cubicwave import _dopri
except ImportError:  # extension not built
    _dopri = None

TOL = 1e-13
PROBLEMS = [
    ("bounded well, s in [0, 20]", (0.5, 0.3, 20.0)),
    ("threshold orbit, s in [0, pi]", (0.0, 0.9122117886751556, math.pi)),
    ("blow-up to cutoff", (2.0, 2.0, 1.0)),
]


def run(mod, args):
    return mod.integrate(*args, TOL, TOL, 1e8, 2_000_000)


def bench(mod, args, repeat: int) -> tuple[float, int]:
    steps = len(run(mod, args)[0])
    best = min(timeit.repeat(lambda: run(mod, args), number=1, repeat=repeat))
    return best, steps


def dense(mod, args, repeat: int, n: int = 10_000) -> float:
    s, _, rc, _ = run(_dopri_py, args)
    s, rc = np.asarray(s), np.asarray(rc)
    q = np.linspace(s[0], s[-1], n)
    return min(timeit.repeat(lambda: mod.dense_eval(s, rc, q), number=1, repeat=repeat))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    opts = ap.parse_args()
    mods = [("python", _dopri_py)] + ([("compiled", _dopri)] if _dopri is not None else [])
    print(f"{'problem':32s} {'backend':9s} {'steps':>6s} {'integrate ms':>13s} {'dense 1e4 ms':>13s}")
    for name, args in PROBLEMS:
        base = None
        for label, mod in mods:
            t, steps = bench(mod, args, opts.repeat)
            d = dense(mod, args, opts.repeat)
            speed = "" if base is None else f"  x{base / t:.0f}"
            base = base or t
            print(f"{name:32s} {label:9s} {steps:6d} {1e3 * t:13.2f} {1e3 * d:13.2f}{speed}")
    if _dopri is None:
        print("compiled kernel not available; build with `pip install -e . --no-build-isolation`")


if __name__ == "__main__":
    main()
