"""Compare the numba kernels with their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--edges 200000]

Both backends are checked to return identical results before timing.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from gpdatlas import _kernels
from gpdatlas.algebra.groups import general_linear_group, symmetric_group


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--vertices", type=int, default=100_000)
    ap.add_argument("--edges", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not _kernels._HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    rng = np.random.default_rng(args.seed)
    u = rng.integers(0, args.vertices, size=args.edges)
    v = rng.integers(0, args.vertices, size=args.edges)
    S4 = symmetric_group(4)
    GL = general_linear_group(2, 3)
    act = S4.mul.copy()  # left multiplication action of S4 on itself

    cases = [
        (f"union_find n={args.vertices} e={args.edges}",
         lambda: _kernels.union_find_numpy(args.vertices, u, v),
         lambda: _kernels.union_find_numba(args.vertices, u, v)),
        (f"associativity |G|={GL.order}",
         lambda: _kernels.associativity_witness_numpy(GL.mul),
         lambda: _kernels.associativity_witness_numba(GL.mul)),
        (f"action axioms |G|={S4.order}",
         lambda: _kernels.action_witness_numpy(S4.mul, act),
         lambda: _kernels.action_witness_numba(S4.mul, act)),
    ]
    print(f"{'kernel':<40} {'numpy (s)':>11} {'numba (s)':>11} {'speedup':>8}")
    for name, np_fn, nb_fn in cases:
        a, b = np_fn(), nb_fn()  # also warms up the jit
        same = np.array_equal(a, b) if isinstance(a, np.ndarray) else a == b
        if not same:
            raise SystemExit(f"{name}: backends disagree")
        t_np, t_nb = best_of(np_fn, args.repeat), best_of(nb_fn, args.repeat)
        print(f"{name:<40} {t_np:>11.5f} {t_nb:>11.5f} {t_np / max(t_nb, 1e-9):>7.1f}x")


if __name__ == "__main__":
    main()
