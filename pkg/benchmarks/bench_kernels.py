"""Compare the compiled and pure-Python graph kernels.

Usage: python3 benchmarks/bench_kernels.py [--sizes 20 60 120] [--repeat 5]

Each case is a seeded random acyclic digraph.  Both backends must return
identical results; the script reports best-of-N wall time per call.
"""
from __future__ import annotations

import argparse
import random
import time

from chainrouting.kernels import available_backends


def random_dag(n: int, p: float, seed: int) -> list[tuple[int, int]]:
    rng = random.Random(seed)
    return [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]


def best_time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[20, 60, 120])
    ap.add_argument("--density", type=float, default=0.3)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; only the Python backend is timed")
    print(f"{'kernel':<18}{'n':>5}{'arcs':>7}" + "".join(f"{b:>12}" for b in backends) + "   speedup")
    for n in args.sizes:
        arcs = random_dag(n, args.density, seed=n)
        cases = {
            "max_flow_paths": lambda m: m.max_flow_paths(n, arcs, 0, n - 1),
            "transitive_closure": lambda m: m.transitive_closure(n, arcs),
        }
        for name, call in cases.items():
            results = {b: call(m) for b, m in backends.items()}
            if len({repr(r) for r in results.values()}) != 1:
                raise SystemExit(f"backends disagree on {name} n={n}")
            times = {b: best_time(lambda m=m: call(m), args.repeat) for b, m in backends.items()}
            cells = "".join(f"{times[b] * 1e3:>10.3f}ms" for b in backends)
            speed = (f"{times['python'] / times['cython']:>9.1f}x"
                     if "cython" in times else "")
            print(f"{name:<18}{n:>5}{len(arcs):>7}{cells}{speed}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
