#!/usr/bin/env python3
"""Benchmark the compiled permutation kernel against the pure-Python fallback.

Measures raw canonicalization throughput (cache-bypassing) and an end-to-end
prove of the rectangle-diagonals problem with the full embedded catalog.
Each backend runs in its own interpreter because the kernel is chosen at
import time (GEODD_PURE=1 forces the fallback).

Usage: python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
import time

CANON_FACTS = 20_000
PROVE_REPEATS = 3


def measure() -> dict:
    import numpy as np

    from geodd import _kernels
    from geodd.catalogs import load_catalog
    from geodd.core import ARITY, DEFAULT_SYMMETRIES, GeometryError, PointTable, make_fact
    from geodd.engine import Problem, compile_rule, prove

    def rectangle_problem() -> Problem:
        points = PointTable()
        a, b, c, d = (points.intern(x) for x in "ABCD")
        return Problem(
            points=points,
            hypotheses=[make_fact("rectangle", (a, b, c, d))],
            goals=[make_fact("cong", (a, c, b, d))],
            rule_units=[],
            name="rectangle-diagonals",
        )

    rng = np.random.default_rng(99)
    kinds = sorted(ARITY)
    facts = []
    while len(facts) < CANON_FACTS:
        kind = kinds[rng.integers(len(kinds))]
        pts = tuple(int(rng.integers(8)) for _ in range(ARITY[kind]))
        try:
            facts.append(make_fact(kind, pts))
        except GeometryError:
            continue

    tables = {k: _kernels.make_table(DEFAULT_SYMMETRIES.group(k)) for k in kinds}
    started = time.perf_counter()
    for fact in facts:
        _kernels.min_permuted(tables[fact.kind], fact.points)
    canon_elapsed = time.perf_counter() - started

    rules = [compile_rule(u, source="builtin") for u in load_catalog("year7")]
    best = float("inf")
    for _ in range(PROVE_REPEATS):
        problem = rectangle_problem()
        started = time.perf_counter()
        result = prove(problem, rules)
        best = min(best, time.perf_counter() - started)
        assert result.proved

    return {
        "backend": _kernels.BACKEND,
        "canon_per_sec": CANON_FACTS / canon_elapsed,
        "canon_us": canon_elapsed / CANON_FACTS * 1e6,
        "prove_ms": best * 1000.0,
    }


def main() -> int:
    if "--single" in sys.argv:
        print(json.dumps(measure()))
        return 0

    here = os.path.dirname(os.path.abspath(__file__))
    root = os.path.dirname(here)
    results = []
    for pure in ("0", "1"):
        env = dict(os.environ, GEODD_PURE=pure)
        proc = subprocess.run(
            [sys.executable, __file__, "--single"],
            env=env,
            capture_output=True,
            text=True,
            check=True,
            cwd=root,
        )
        results.append(json.loads(proc.stdout.strip().splitlines()[-1]))

    print(f"{'backend':<10} {'canon/s':>12} {'us/canon':>10} {'theorem2 prove':>16}")
    for r in results:
        print(f"{r['backend']:<10} {r['canon_per_sec']:>12,.0f} {r['canon_us']:>10.2f} "
              f"{r['prove_ms']:>13.1f} ms")
    if results[0]["backend"] == results[1]["backend"]:
        print("note: compiled kernel unavailable; both rows ran the fallback")
    else:
        speedup = results[0]["canon_per_sec"] / results[1]["canon_per_sec"]
        print(f"compiled kernel canon speedup: {speedup:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
