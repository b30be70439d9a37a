"""Batch command-line front end.

Subcommands: run (sample the collapsed posterior and write artifacts),
baseline (two-stage BIC report from run artifacts), simulate (draw a
network from the generative model), summarize (recompute summary.json
from a draws file).  All outputs are deterministic for fixed inputs.
"""

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, io
from .bic import build_report, select_model
from .model import Hyperparams
from .postprocess import align_draws, summarize
from .sampler import MoveCounters, RunConfig, run_chain
from .synth import GenSpec, sample_network


def _add_hyper_flags(p: argparse.ArgumentParser):
    p.add_argument("--d", type=int, default=2, help="latent dimension")
    p.add_argument("--sigma-z2", type=float, default=1.0,
                   help="position proposal variance")
    p.add_argument("--sigma-beta2", type=float, default=0.5,
                   help="intercept proposal variance")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--delta", type=float, default=0.103)
    p.add_argument("--nu", type=float, default=3.0)
    p.add_argument("--omega2", type=float, default=10.0)
    p.add_argument("--xi", type=float, default=0.0)
    p.add_argument("--psi", type=float, default=2.0)
    p.add_argument("--a-eject", type=float, default=1.0)
    p.add_argument("--gmax", type=int, default=None,
                   help="max components (default: n // 2)")


def _hyperparams(args) -> Hyperparams:
    return Hyperparams(xi=args.xi, psi=args.psi, alpha=args.alpha,
                       delta=args.delta, nu=args.nu, omega2=args.omega2,
                       d=args.d, g_max=args.gmax, sigma_z2=args.sigma_z2,
                       sigma_beta2=args.sigma_beta2, a_eject=args.a_eject)


def _run_one_chain(payload):
    net, hp, cfg = payload
    return run_chain(net, hp, cfg)


def cmd_run(args) -> int:
    net = io.ingest(args.data, args.format, args.directed)
    hp = _hyperparams(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    art = io.RunArtifacts(out)

    seeds = [args.seed + c for c in range(args.chains)]
    jobs = [(net, hp, RunConfig(iterations=args.iters, burnin=args.burnin,
                                thin=args.thin, seed=s)) for s in seeds]
    if args.chains == 1:
        results = [_run_one_chain(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=min(args.chains, 8)) as pool:
            results = list(pool.map(_run_one_chain, jobs))
    # chain c's sweeps are numbered c*iters + t so merged draws stay unique
    draws = []
    for c, (chain_draws, _) in enumerate(results):
        for d in chain_draws:
            if c:
                d.iteration += c * args.iters
            draws.append(d)
    counters = MoveCounters()
    for _, c in results:
        counters.table += c.table
    if not draws:
        print("error: no retained draws (check --iters/--burnin/--thin)",
              file=sys.stderr)
        return 1

    aligned = align_draws(draws)
    summary = summarize(aligned, counters)
    io.write_draws(art.draws, draws, net.n)
    iters = np.array([d.iteration for d in draws])
    io.write_positions(art.positions, iters, np.stack([d.Z for d in draws]))
    io.write_positions(art.positions_aligned, iters, aligned.Z_aligned)
    io.write_json(art.summary, summary.to_dict())
    io.write_json(art.counters, {"schema_version": io.SCHEMA_VERSION,
                                 "counters": io.counters_dict(counters)})
    io.write_adjacency(art.network, net)
    io.write_json(art.metadata, {
        "schema_version": io.SCHEMA_VERSION,
        "code_version": __version__,
        "data": str(args.data),
        "data_sha256": io.data_checksum(args.data),
        "format": args.format,
        "directed": net.directed,
        "n": net.n,
        "chains": args.chains,
        "chain_draws": [len(r[0]) for r in results],
        "config": {"iters": args.iters, "burnin": args.burnin,
                   "thin": args.thin, "seed": args.seed},
        "hyperparams": {k: getattr(hp, k) for k in
                        ("xi", "psi", "alpha", "delta", "nu", "omega2", "d",
                         "sigma_z2", "sigma_beta2", "a_eject")} |
                       {"g_max": hp.resolve_g_max(net.n)},
    })
    probs = summary.model_probabilities
    modal = max(probs, key=lambda g: probs[g])
    print(f"run complete: {len(draws)} draws, modal G = {modal} "
          f"(pi = {probs[modal]:.4f}), artifacts in {out}")
    return 0


def _aligned_from_artifacts(art: io.RunArtifacts):
    from .sampler import DrawRecord
    iters, gs, betas, logliks, logposts, ks = io.read_draws(art.draws)
    pit, zs = io.read_positions(art.positions)
    if not np.array_equal(pit, np.unique(iters)):
        raise io.ParseError("draws and positions files disagree on iterations")
    order = {it: r for r, it in enumerate(pit)}
    draws = [DrawRecord(int(iters[r]), int(gs[r]), float(betas[r]),
                        ks[r], zs[order[int(iters[r])]],
                        float(logliks[r]), float(logposts[r]))
             for r in range(len(iters))]
    return draws


def cmd_baseline(args) -> int:
    art = io.RunArtifacts(Path(args.artifacts))
    art.require("draws", "positions", "network", "metadata")
    meta = io.read_json(art.metadata)
    net = io.ingest(art.network, "adjacency", meta["directed"])
    hp = Hyperparams(d=len(io.read_positions(art.positions)[1][0][0]))
    draws = _aligned_from_artifacts(art)
    aligned = align_draws(draws)
    reports = build_report(net, aligned, hp, args.gcap, seed=args.seed)
    best = select_model(reports)
    io.write_json(Path(args.out), {
        "schema_version": io.SCHEMA_VERSION,
        "g_cap": args.gcap,
        "selected_G": best,
        "reports": [r.to_dict() for r in reports],
    })
    print(f"baseline BIC report written to {args.out}; selected G = {best}")
    return 0


def cmd_simulate(args) -> int:
    spec = GenSpec.from_json(args.spec)
    net, Z, K = sample_network(spec)
    io.write_edgelist(args.out, net,
                      header=f"simulated LPCM network, seed={spec.seed}")
    if args.truth:
        io.write_json(args.truth, {
            "schema_version": io.SCHEMA_VERSION,
            "Z_true": Z.tolist(),
            "K_true": [int(k) + 1 for k in K],
        })
    print(f"simulated network with {net.n} actors and {net.n_ties} ties "
          f"written to {args.out}")
    return 0


def cmd_summarize(args) -> int:
    art = io.RunArtifacts(Path(args.artifacts))
    art.require("draws", "positions")
    counters = None
    if art.counters.exists():
        counters = MoveCounters()
        stored = io.read_json(art.counters)["counters"]
        from .sampler import _ROW
        for m, row in _ROW.items():
            counters.table[row, 0] = stored[m]["attempted"]
            counters.table[row, 1] = stored[m]["accepted"]
    draws = _aligned_from_artifacts(art)
    aligned = align_draws(draws)
    summary = summarize(aligned, counters)
    io.write_json(art.summary, summary.to_dict())
    io.write_positions(art.positions_aligned, aligned.iterations,
                       aligned.Z_aligned)
    print(f"summary written to {art.summary}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="clpcm",
        description="Collapsed latent position cluster model sampler")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the sampler and write artifacts")
    p.add_argument("--data", required=True)
    p.add_argument("--format", choices=("edgelist", "adjacency"),
                   default="edgelist")
    p.add_argument("--directed", action="store_true")
    p.add_argument("--iters", type=int, required=True)
    p.add_argument("--burnin", type=int, default=0)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chains", type=int, default=1)
    p.add_argument("--out", required=True)
    _add_hyper_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("baseline", help="BIC report from run artifacts")
    p.add_argument("--artifacts", required=True)
    p.add_argument("--gcap", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("simulate", help="draw a network from the model")
    p.add_argument("--spec", required=True, help="GenSpec JSON file")
    p.add_argument("--out", required=True, help="edge-list output path")
    p.add_argument("--truth", default=None,
                   help="optional JSON output of Z_true/K_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("summarize", help="recompute summary from artifacts")
    p.add_argument("--artifacts", required=True)
    p.set_defaults(func=cmd_summarize)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
