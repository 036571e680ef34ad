"""Compare the compiled and pure-Python kernel backends.

Usage::

    python3 benchmarks/bench_kernels.py [--rows 20000] [--depth 8] [--repeat 5]

Each case is timed with :mod:`timeit` (best of ``--repeat``) under every
available backend; the last column is the speed-up over pure Python.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from cfinterp import _kernels
from cfinterp.functional import NodeSystem
from cfinterp.iicf import compute_kernels, verify_interpolation

SMOOTH_NODES = ["sin(z)/4", "1+sin(2*z)/4", "2+sin(3*z)/4", "3+sin(4*z)/4"]


def make_cases(rows: int, depth: int, grid: int):
    rng = np.random.default_rng(0)
    b0 = rng.uniform(-1, 1, rows)
    a = rng.uniform(-1, 1, (rows, depth))
    b = rng.uniform(2, 3, (rows, depth))
    db0, da, db = (rng.normal(size=x.shape) for x in (b0, a, b))
    y = np.sin(np.linspace(0, 3, grid + 1))

    def kernels_end_to_end():
        # rebuilt each call so no cached quadrature table is reused
        ks = compute_kernels(NodeSystem.from_expressions(SMOOTH_NODES, "exp(s)", 512))
        verify_interpolation(ks)

    return {
        f"backward_batch {rows}x{depth}": lambda: _kernels.impl.backward_batch(b0, a, b, 1e-300),
        f"forward_batch {rows}x{depth}": lambda: _kernels.impl.forward_batch(b0, a, b),
        f"forward_deriv_batch {rows}x{depth}": lambda: _kernels.impl.forward_deriv_batch(b0, a, b, db0, da, db),
        f"cumulative_quad N={grid}": lambda: _kernels.impl.cumulative_quad(y, 1.0 / grid),
        "kernels + verify (n=3, N=512)": kernels_end_to_end,
    }


def best_time(fn, repeat: int) -> float:
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=number)) / number


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=20000)
    parser.add_argument("--depth", type=int, default=8)
    parser.add_argument("--grid", type=int, default=100000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    backends = _kernels.available_backends()
    cases = make_cases(args.rows, args.depth, args.grid)
    results = {}
    original = _kernels.backend_name
    try:
        for name in backends:
            _kernels.set_backend(name)
            results[name] = {case: best_time(fn, args.repeat) for case, fn in cases.items()}
    finally:
        _kernels.set_backend(original)

    width = max(len(c) for c in cases)
    header = f"{'case':<{width}}" + "".join(f"{b + ' [ms]':>16}" for b in backends)
    if "cython" in backends:
        header += f"{'speed-up':>12}"
    print(header)
    for case in cases:
        line = f"{case:<{width}}" + "".join(f"{results[b][case] * 1e3:>16.3f}" for b in backends)
        if "cython" in backends:
            line += f"{results['python'][case] / results['cython'][case]:>11.1f}x"
        print(line)
    if "cython" not in backends:
        print("compiled backend unavailable; only the pure-Python timings are shown")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
