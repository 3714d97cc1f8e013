#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Times the two hot kernels on synthetic slabs shaped like a desk-scale
run (block-major assignment tables, packed candidate tuples), then an
end-to-end decode on a real instance under both backends.

Usage: python benchmarks/bench_backends.py [--quick]
"""

import argparse
import time

import numpy as np

import hypersplit._kernels_py as py_impl

try:
    import hypersplit._kernels as c_impl
except ImportError:
    c_impl = None


def _case(g, R, T, P, seed=0):
    rng = np.random.default_rng(seed)
    assign = np.ascontiguousarray(rng.integers(0, T, size=(g, R), dtype=np.int16))
    outcomes = (rng.random((R, T)) < 0.03).astype(np.uint8)
    tuples = np.empty((P, 3), dtype=np.int32)
    for i in range(P):
        tuples[i] = np.sort(rng.choice(g, size=3, replace=False))
    sigs = tuples[: min(P, 500)].copy()
    return assign, outcomes, tuples, sigs


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(quick: bool) -> None:
    shapes = [(729, 295, 17, 100_000), (2187, 1000, 30, 300_000)]
    if quick:
        shapes = shapes[:1]
    print(f"{'kernel':<16}{'shape (g,R,T,P)':<26}{'numpy':>10}{'compiled':>10}{'speedup':>9}")
    for g, R, T, P in shapes:
        assign, outcomes, tuples, sigs = _case(g, R, T, P)
        t_py = _time(lambda: py_impl.probe_slab(assign, outcomes, tuples))
        row = f"{'probe_slab':<16}{f'({g},{R},{T},{P})':<26}{t_py:>9.3f}s"
        if c_impl is not None:
            t_c = _time(lambda: c_impl.probe_slab(assign, outcomes, tuples))
            assert np.array_equal(
                py_impl.probe_slab(assign, outcomes, tuples),
                c_impl.probe_slab(assign, outcomes, tuples),
            )
            row += f"{t_c:>9.3f}s{t_py / t_c:>8.1f}x"
        print(row)

        t_py = _time(lambda: py_impl.outcomes_slab(assign, sigs, T))
        row = f"{'outcomes_slab':<16}{f'({g},{R},{T},{len(sigs)})':<26}{t_py:>9.3f}s"
        if c_impl is not None:
            t_c = _time(lambda: c_impl.outcomes_slab(assign, sigs, T))
            row += f"{t_c:>9.3f}s{t_py / t_c:>8.1f}x"
        print(row)


def bench_end_to_end(quick: bool) -> None:
    import os
    import subprocess
    import sys

    code = (
        "import time\n"
        "from hypersplit import backend\n"
        "from hypersplit.decoder import decode\n"
        "from hypersplit.hypergraph import make_model_params, sample_er\n"
        "from hypersplit.oracle import evaluate_outcomes\n"
        "from hypersplit.testdesign import build_design, derive_params\n"
        "params = make_model_params({n}, m_bar=20.0, seed=7)\n"
        "h = sample_er(params)\n"
        "design = build_design(derive_params(params, C1=6, C2=216, C_prime=5))\n"
        "table = evaluate_outcomes(h, design)\n"
        "t0 = time.perf_counter()\n"
        "res = decode(design, table)\n"
        "dt = time.perf_counter() - t0\n"
        "print(f'{{backend.BACKEND_NAME:>10}}: decode {{dt:.2f}}s, '\n"
        "      f'{{res.outcome_checks}} outcome checks, '\n"
        "      f'{{len(res.estimated_edges)}} edges')\n"
    ).format(n=243 if quick else 729)
    print("\nend-to-end decode (n = %d, m_bar = 20, C1 = 6, C2 = 216):" % (243 if quick else 729))
    sys.stdout.flush()  # keep parent/child output ordered
    for backend_name in ("python", "compiled") if c_impl is not None else ("python",):
        env = dict(os.environ, HYPERSPLIT_BACKEND=backend_name)
        subprocess.run([sys.executable, "-c", code], env=env, check=True)


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller shapes")
    args = parser.parse_args()
    if c_impl is None:
        print("compiled kernels not built; timing the NumPy fallback only\n")
    bench_kernels(args.quick)
    bench_end_to_end(args.quick)


if __name__ == "__main__":
    main()
