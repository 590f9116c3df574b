"""Compiled kernels against their plain-Python source.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json]

Each kernel is called once to trigger compilation (or load it from the numba
cache), then timed with ``timeit``; the best of ``--repeat`` runs is reported.
The same inputs go to both paths and the outputs are compared.
"""
import argparse
import json
import timeit

import numpy as np

from ncmoments import kernels
from ncmoments._accel import NUMBA_ENABLED, python_impl


def _cases():
    rng = np.random.default_rng(0)

    def cmat(n):
        return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))

    A8, A16 = cmat(8), cmat(16)
    pts = rng.standard_normal(200) + 1j * rng.standard_normal(200)
    x4 = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    A4 = cmat(4)
    return [
        ("hessenberg n=16", kernels.hessenberg, (A16,)),
        ("hqr_eigvals n=16", kernels.hqr_eigvals, (A16, 1600)),
        ("nelder_mead_sigma n=8", kernels.nelder_mead_sigma,
         (A8, 0.0, 0.0, 1.0, 1e-12, 1e-14, 4000)),
        ("welzl_circle m=200", kernels.welzl_circle, (pts.real.copy(), pts.imag.copy())),
        ("lemma_grid_max res=60", kernels.lemma_grid_max, (60,)),
        ("even_moment_ascent n=4 k=2", kernels.even_moment_ascent, (A4, x4, 2, 500, 1e-14)),
    ]


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.allclose(a, b, rtol=1e-9, atol=1e-12)


def bench(repeat=5):
    rows = []
    for name, fn, args in _cases():
        slow = python_impl(fn)
        fast_out = fn(*args)  # compile or load from cache
        slow_out = slow(*args)
        number = 3
        t_fast = min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number
        t_slow = min(timeit.repeat(lambda: slow(*args), number=1, repeat=max(1, repeat // 2)))
        rows.append({"kernel": name, "numba_s": t_fast, "python_s": t_slow,
                     "speedup": t_slow / t_fast, "outputs_agree": bool(_same(fast_out, slow_out))})
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    if not NUMBA_ENABLED:
        print("numba is disabled (NCMOMENTS_DISABLE_NUMBA); both columns time the same code")
    rows = bench(args.repeat)
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'kernel':30s} {'numba [ms]':>11s} {'python [ms]':>12s} {'speedup':>9s}  agree")
    for r in rows:
        print(f"{r['kernel']:30s} {1e3 * r['numba_s']:11.3f} {1e3 * r['python_s']:12.3f} "
              f"{r['speedup']:8.1f}x  {r['outputs_agree']}")


if __name__ == "__main__":
    main()
