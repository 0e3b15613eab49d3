"""Time the compiled kernels against the numpy/pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3]

Each kernel runs on identical input in both backends; outputs are checked
for equality before timings are reported.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from tetratsp.instances import build_modified
from tetratsp.kernels import backends
from tetratsp.oracle import neighbor_lists
from tetratsp.subtour import solve_subtour_lp


def _best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def _cases(rng):
    pts = rng.random((16, 2))
    D16 = np.hypot(*(pts[:, None, :] - pts[None, :, :]).transpose(2, 0, 1))
    yield "held_karp (16 pts)", "held_karp", (D16,)

    inst = build_modified(48, 32)
    W = solve_subtour_lp(inst).solution.matrix()
    yield "stoer_wagner (LP support, 205 vtx)", "stoer_wagner", (W,)

    pts = rng.random((1000, 2))
    D = np.hypot(*(pts[:, None, :] - pts[None, :, :]).transpose(2, 0, 1))
    yield "two_opt (1000 pts, random start)", "two_opt", (rng.permutation(1000), D, neighbor_lists(D))


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    impls = backends()
    if "cython" not in impls:
        print("compiled extension not built; only the fallback is available")
    rng = np.random.default_rng(0)
    print(f"{'kernel':38s} " + " ".join(f"{name:>10s}" for name in impls) + "   speedup")
    for title, fname, fargs in _cases(rng):
        times, outs = {}, {}
        for name, mod in impls.items():
            times[name], outs[name] = _best_of(lambda: getattr(mod, fname)(*fargs), args.repeat)
        ref = outs["python"]
        for name, out in outs.items():
            same = (np.array_equal(out[1], ref[1]) and out[0] == ref[0]) if isinstance(out, tuple) \
                else np.array_equal(out, ref)
            if not same:
                raise SystemExit(f"{fname}: {name} output differs from the fallback")
        speed = f"{times['python'] / times['cython']:8.1f}x" if "cython" in times else ""
        print(f"{title:38s} " + " ".join(f"{times[n]:9.4f}s" for n in impls) + f"  {speed}")


if __name__ == "__main__":
    main()
