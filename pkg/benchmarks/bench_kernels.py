"""Compare the numba and numpy statevector backends on QAOA circuits.

    python3 benchmarks/bench_kernels.py [--sizes 10 14 18] [--repeats 5]

The first numba call includes compilation, so each backend gets one untimed
warm-up run; results are checked for agreement before timing is reported.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from qaoa_kit import _kernels
from qaoa_kit import catalog as C
from qaoa_kit import engine as EN
from qaoa_kit import problems as P
from qaoa_kit.graphs import Graph, random_regular_graph


def _cases(n: int, rng):
    g = random_regular_graph(n, 3, rng)
    yield "maxcut x-mixer", C.build_pipeline(P.MaxCut(g))
    yield "mis controlled-x", C.build_pipeline(P.MaxIndependentSet(g))
    if n % 2 == 0:
        yield "bisection ring", C.build_pipeline(P.GraphPartitioning(g))
    k = max(2, n // 4)
    yield f"colorable-subgraph ring (4 x {k})", C.build_pipeline(
        P.MaxColorableSubgraph(Graph(k, tuple((i, i + 1) for i in range(k - 1))), 4))


def _best(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 14, 18])
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if _kernels.NUMBA_KERNELS is None:
        print("numba unavailable; only the numpy backend can run")
        return
    rng = np.random.default_rng(args.seed)
    sched = EN.QaoaSchedule(rng.uniform(0, 1, args.p), rng.uniform(0, 1, args.p))
    print(f"{'case':<36} {'qubits':>6} {'numpy [ms]':>11} {'numba [ms]':>11} {'speedup':>8}")
    for n in args.sizes:
        for name, pipe in _cases(n, rng):
            circ = pipe.circuit(args.p)
            a = EN.simulate(circ, sched, "numpy")
            b = EN.simulate(circ, sched, "numba")
            assert np.allclose(a, b, atol=1e-10), name
            t_np = _best(lambda: EN.simulate(circ, sched, "numpy"), args.repeats)
            t_nb = _best(lambda: EN.simulate(circ, sched, "numba"), args.repeats)
            print(f"{name:<36} {circ.n_qubits:>6} {1e3 * t_np:>11.2f} {1e3 * t_nb:>11.2f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
