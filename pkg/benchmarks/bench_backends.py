"""Compiled simplex kernel against the numpy fallback.

    python benchmarks/bench_backends.py [--repeat 3]

Times standard-form solves on random gauge-shaped LPs (the workload of
``gauge_eval``) in float64 and long double, plus an end-to-end gauge
batch, and checks that both kernels return the same status and pivots.
"""
import argparse
import time

import numpy as np

from infconvkit import lp
from infconvkit.convex_bodies import VPolytope
from infconvkit.gauge import Gauge, gauge_eval


def gauge_lps(count, seed=0):
    # min sum(mu) s.t. V^T mu = x, mu >= 0
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n, k = int(rng.integers(2, 4)), int(rng.integers(3, 9))
        V = rng.uniform(-2, 2, size=(k, n))
        out.append((np.ones(k), np.ascontiguousarray(V.T), rng.uniform(-2, 2, n)))
    return out


def time_solves(problems, dtype, repeat):
    probs = [(c.astype(dtype), A.astype(dtype), b.astype(dtype)) for c, A, b in problems]
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        results = [lp.solve_standard(c, A, b) for c, A, b in probs]
        best = min(best, time.perf_counter() - t0)
    return best, [(r.status, r.pivots) for r in results]


def time_gauges(repeat, seed=1):
    rng = np.random.default_rng(seed)
    cases = [(Gauge(VPolytope(rng.uniform(-2, 2, size=(6, 2)))), rng.uniform(-2, 2, size=(50, 2))) for _ in range(40)]
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        for g, X in cases:
            for x in X:
                gauge_eval(g, x)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = lp.available_backends()
    if "compiled" not in backends:
        print("compiled kernel not built; only the python backend is available")
    problems = gauge_lps(args.count)
    rows, traces = [], {}
    for name in backends:
        with lp.backend(name):
            t64, tr64 = time_solves(problems, np.float64, args.repeat)
            tld, trld = time_solves(problems, np.longdouble, args.repeat)
            tg = time_gauges(args.repeat)
        traces[name] = (tr64, trld)
        rows.append((name, t64, tld, tg))
    print(f"{'backend':10s} {'float64 LPs':>14s} {'longdouble LPs':>16s} {'2000 gauges':>13s}")
    for name, t64, tld, tg in rows:
        print(f"{name:10s} {t64 * 1e6 / args.count:11.1f} us {tld * 1e6 / args.count:13.1f} us {tg:11.3f} s")
    if len(rows) == 2:
        (_, a64, ald, ag), (_, b64, bld, bg) = sorted(rows)
        print(f"speedup    {b64 / a64:13.1f}x {bld / ald:15.1f}x {bg / ag:12.1f}x")
        same = traces["compiled"] == traces["python"]
        print(f"identical status and pivot counts: {same}")


if __name__ == "__main__":
    main()
