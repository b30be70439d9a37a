"""Benchmark the JIT-compiled kernels against the pure-numpy fallback.

Runs the same chain under both paths (CLPCM_DISABLE_NUMBA toggled via
subprocess) and reports sweeps per second.  The two paths are bit-identical;
this only measures speed.

Usage: python benchmarks/bench_kernels.py [--dataset zachary] [--iters 20000]
"""

import argparse
import json
import os
import subprocess
import sys
import textwrap


def run_path(disable_numba: bool, dataset: str, iters: int) -> dict:
    script = textwrap.dedent(f"""
        import json, time
        from clpcm import Hyperparams, RunConfig, run_chain
        from clpcm import io, NUMBA_ENABLED
        net = io.ingest(io.dataset_path({dataset!r}), "edgelist",
                        directed={dataset!r} == "monks")
        hp = Hyperparams(sigma_z2=1.0, sigma_beta2=0.5)
        # warm-up: trigger compilation outside the timed region
        run_chain(net, hp, RunConfig(iterations=50, seed=0))
        t0 = time.perf_counter()
        draws, _ = run_chain(net, hp, RunConfig(iterations={iters}, seed=1))
        dt = time.perf_counter() - t0
        print(json.dumps({{"numba": NUMBA_ENABLED, "seconds": dt,
                           "sweeps_per_s": {iters} / dt,
                           "final_loglik": draws[-1].log_likelihood}}))
    """)
    env = dict(os.environ, CLPCM_DISABLE_NUMBA="1" if disable_numba else "0")
    out = subprocess.run([sys.executable, "-c", script], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dataset", default="zachary",
                    choices=("monks", "zachary", "dolphins"))
    ap.add_argument("--iters", type=int, default=20000)
    ap.add_argument("--fallback-iters", type=int, default=None,
                    help="fewer sweeps for the slow path (default iters/20)")
    args = ap.parse_args()
    fb_iters = args.fallback_iters or max(args.iters // 20, 200)

    jit = run_path(False, args.dataset, args.iters)
    fb = run_path(True, args.dataset, fb_iters)
    print(f"dataset={args.dataset}")
    print(f"  numba   : {jit['sweeps_per_s']:10.1f} sweeps/s "
          f"({jit['seconds']:.2f}s for {args.iters})")
    print(f"  fallback: {fb['sweeps_per_s']:10.1f} sweeps/s "
          f"({fb['seconds']:.2f}s for {fb_iters})")
    print(f"  speedup : {jit['sweeps_per_s'] / fb['sweeps_per_s']:.1f}x")


if __name__ == "__main__":
    main()
