"""Compiled vs pure-Python kernels: Delaunay build, batch point location,
and raw predicate throughput.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]
"""
import argparse
import time

import numpy as np

from dtl import _backend
from dtl.predicates import insphere_ids, orient_ids
from dtl.triangulation import build_delaunay, locate_many


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(quick):
    rng = np.random.default_rng(0)
    sizes = [(2, 1000), (2, 4000), (3, 500)] if quick else [(2, 1000), (2, 6400), (3, 1000), (4, 150)]
    for p, n in sizes:
        X = rng.random((n, p))
        Q = rng.random((20000 if not quick else 5000, p))
        yield f"build p={p} n={n}", (lambda X=X: build_delaunay(X))
        tri = build_delaunay(X)
        yield f"locate p={p} n={n} q={len(Q)}", (lambda tri=tri, Q=Q: locate_many(tri, Q))
    P = rng.random((4, 2))
    ids = [0, 1, 2]
    yield "orient p=2 x20000", lambda: [orient_ids(P, ids) for _ in range(20000)]
    yield "insphere p=2 x20000", lambda: [insphere_ids(P, ids, 3) for _ in range(20000)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    backends = _backend.available()
    if len(backends) == 1:
        print("compiled kernels not built; timing the pure-Python backend only")
    results = {}
    for b in backends:
        with _backend.use_backend(b):
            for label, fn in cases(args.quick):
                results.setdefault(label, {})[b] = best_of(fn, args.repeat)
    head = f"{'case':34s}" + "".join(f"{b:>12s}" for b in backends)
    if len(backends) == 2:
        head += f"{'speedup':>10s}"
    print(head)
    for label, r in results.items():
        line = f"{label:34s}" + "".join(f"{r[b]:11.4f}s" for b in backends)
        if len(backends) == 2:
            line += f"{r['python'] / r['cython']:9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
