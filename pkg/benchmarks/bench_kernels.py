"""Compare the compiled search kernels with the plain-Python fallback.

Each backend runs in its own interpreter because the choice is made at
import time (SDPATH_DISABLE_NUMBA=1 selects the fallback). Search time
excludes discretization, graph building and numba compilation.

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --sizes 10 30 --eps 1 --repeat 3
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def worker(n, seed, eps, algos, repeat):
    import numpy as np

    from sdpath._accel import USE_NUMBA
    from sdpath.discretize import discretize
    from sdpath.graph import DescentGraph
    from sdpath.oracle import gen_random_terrain
    from sdpath.sssp import solve

    mesh = gen_random_terrain(n, seed=seed)
    g = DescentGraph(discretize(mesh, eps, "uniform"))
    s = int(np.argmax(mesh.vertices[:, 2]))
    # warm up: compiles (or loads cached) kernels
    warm = DescentGraph(discretize(gen_random_terrain(4, seed=1), 1.0, "uniform"))
    out = {"numba": USE_NUMBA, "nodes": g.n_nodes, "times": {}, "dist_sum": {}}
    for algo in algos:
        solve(warm, 0, algo)
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            t = solve(g, s, algo)
            best = min(best, time.perf_counter() - t0)
        fin = np.isfinite(t.dist)
        out["times"][algo] = best
        out["dist_sum"][algo] = float(t.dist[fin].sum())
    print(json.dumps(out))


def run_backend(disable, n, seed, eps, algos, repeat):
    env = dict(os.environ)
    if disable:
        env["SDPATH_DISABLE_NUMBA"] = "1"
    else:
        env.pop("SDPATH_DISABLE_NUMBA", None)
    cmd = [sys.executable, __file__, "--worker", str(n), str(seed), str(eps), str(repeat), *algos]
    res = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 30])
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--eps", type=float, default=1.0)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--algos", nargs="+", default=["dijkstra", "bushwhack"])
    ap.add_argument("--worker", nargs="+", help=argparse.SUPPRESS)
    args = ap.parse_args(argv)

    if args.worker:
        n, seed, eps, repeat, *algos = args.worker
        worker(int(n), int(seed), float(eps), algos, int(repeat))
        return 0

    print(f"{'n':>4} {'nodes':>8} {'algo':>10} {'numba_s':>10} {'python_s':>10} {'speedup':>8}  agree")
    for n in args.sizes:
        fast = run_backend(False, n, args.seed, args.eps, args.algos, args.repeat)
        slow = run_backend(True, n, args.seed, args.eps, args.algos, 1)
        if not fast["numba"]:
            print("numba is not installed; both columns use the fallback", file=sys.stderr)
        for algo in args.algos:
            tf, ts = fast["times"][algo], slow["times"][algo]
            agree = abs(fast["dist_sum"][algo] - slow["dist_sum"][algo]) <= 1e-9 * max(1.0, fast["dist_sum"][algo])
            print(f"{n:>4} {fast['nodes']:>8} {algo:>10} {tf:>10.4f} {ts:>10.3f} {ts / tf:>8.1f}  {agree}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
