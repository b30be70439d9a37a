"""Metropolis-within-Gibbs + trans-model sampler for the collapsed model.

One sweep applies, in fixed order: per-actor position updates, the
intercept update, a full Gibbs pass over allocations, one attempt each of
moves 1-3, and one ejection-or-absorption.  Moves on K that need two
components are skipped (and not counted) while G = 1.  Runs are
bit-reproducible for a fixed seed; the RNG stream consumption order is
documented in the README and in ``_kernels``.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import _kernels
from .model import ChainState, Hyperparams, Network

MOVE_NAMES = ("Z", "beta", "gibbs", "move1", "move2", "move3",
              "eject", "absorb")
_ROW = {"Z": _kernels.ROW_Z, "beta": _kernels.ROW_BETA,
        "gibbs": _kernels.ROW_GIBBS, "move1": _kernels.ROW_M1,
        "move2": _kernels.ROW_M2, "move3": _kernels.ROW_M3,
        "eject": _kernels.ROW_EJECT, "absorb": _kernels.ROW_ABSORB}


@dataclass
class MoveCounters:
    """Proposal attempt/acceptance counts per move type."""

    table: np.ndarray = field(default_factory=lambda: np.zeros((8, 2), dtype=np.int64))

    def attempted(self, move: str) -> int:
        return int(self.table[_ROW[move], 0])

    def accepted(self, move: str) -> int:
        return int(self.table[_ROW[move], 1])

    def rate(self, move: str) -> float:
        a = self.attempted(move)
        return self.accepted(move) / a if a else float("nan")

    def rates(self) -> Dict[str, float]:
        return {m: self.rate(m) for m in MOVE_NAMES}

    def as_dict(self) -> Dict[str, Tuple[int, int]]:
        return {m: (self.attempted(m), self.accepted(m)) for m in MOVE_NAMES}


@dataclass
class RunConfig:
    """Chain length and reproducibility settings."""

    iterations: int
    burnin: int = 0
    thin: int = 1
    seed: int = 0
    init: str = "prior"

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0 <= self.burnin < self.iterations:
            raise ValueError("burnin must satisfy 0 <= burnin < iterations")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if self.init != "prior":
            raise ValueError(f"unknown init policy {self.init!r}")


@dataclass
class DrawRecord:
    """One retained draw of the chain."""

    iteration: int
    G: int
    beta: float
    K: np.ndarray
    Z: np.ndarray
    log_likelihood: float
    log_posterior: float


def _hp_args(hp: Hyperparams):
    return (hp.d, hp.alpha, hp.delta, hp.nu, hp.omega2)


def _require_consistent(state: ChainState, hp: Hyperparams):
    if state.Z.shape[1] != hp.d:
        raise ValueError("state dimension does not match hyperparameters")


def update_positions(state: ChainState, net: Network, hp: Hyperparams,
                     rng: np.random.Generator,
                     counters: Optional[MoveCounters] = None) -> ChainState:
    """Update 1: per-actor Metropolis moves with spherical normal proposals."""
    _require_consistent(state, hp)
    counters = counters or MoveCounters()
    D = _kernels.dist_matrix(state.Z)
    _kernels.update_positions(state.Z, D, net.adjacency, state.K,
                              state.stats.counts, state.stats.S, state.stats.Q,
                              state.beta, net.directed,
                              hp.d, hp.alpha, hp.delta, hp.omega2,
                              hp.sigma_z2, rng, counters.table)
    return state


def update_intercept(state: ChainState, net: Network, hp: Hyperparams,
                     rng: np.random.Generator,
                     counters: Optional[MoveCounters] = None) -> ChainState:
    """Update 2: Metropolis move on the intercept."""
    counters = counters or MoveCounters()
    D = _kernels.dist_matrix(state.Z)
    state.beta = float(_kernels.update_intercept(
        D, net.adjacency, state.beta, net.directed,
        hp.xi, hp.psi, hp.sigma_beta2, rng, counters.table))
    return state


def gibbs_allocations(state: ChainState, net: Network, hp: Hyperparams,
                      rng: np.random.Generator,
                      counters: Optional[MoveCounters] = None) -> ChainState:
    """Update 3: full Gibbs pass over the allocation vector."""
    counters = counters or MoveCounters()
    _kernels.gibbs_allocations(state.Z, state.K, state.stats.counts,
                               state.stats.S, state.stats.Q, state.G,
                               *_hp_args(hp), rng, counters.table)
    return state


def move1(state: ChainState, hp: Hyperparams, rng: np.random.Generator,
          counters: Optional[MoveCounters] = None) -> ChainState:
    counters = counters or MoveCounters()
    _kernels.move1(state.Z, state.K, state.stats.counts, state.stats.S,
                   state.stats.Q, state.G, *_hp_args(hp), rng, counters.table)
    return state


def move2(state: ChainState, hp: Hyperparams, rng: np.random.Generator,
          counters: Optional[MoveCounters] = None) -> ChainState:
    counters = counters or MoveCounters()
    _kernels.move2(state.Z, state.K, state.stats.counts, state.stats.S,
                   state.stats.Q, state.G, *_hp_args(hp), rng, counters.table)
    return state


def move3(state: ChainState, hp: Hyperparams, rng: np.random.Generator,
          counters: Optional[MoveCounters] = None) -> ChainState:
    counters = counters or MoveCounters()
    _kernels.move3(state.Z, state.K, state.stats.counts, state.stats.S,
                   state.stats.Q, state.G, *_hp_args(hp), rng, counters.table)
    return state


def eject_absorb(state: ChainState, net: Network, hp: Hyperparams,
                 rng: np.random.Generator,
                 counters: Optional[MoveCounters] = None) -> ChainState:
    counters = counters or MoveCounters()
    g_max = hp.resolve_g_max(net.n)
    state.G = int(_kernels.eject_absorb(
        state.Z, state.K, state.stats.counts, state.stats.S, state.stats.Q,
        state.G, g_max, *_hp_args(hp), hp.a_eject, rng, counters.table))
    return state


def sweep(state: ChainState, net: Network, hp: Hyperparams,
          rng: np.random.Generator, counters: Optional[MoveCounters] = None,
          compact: bool = True) -> ChainState:
    """One full sweep in the fixed move order."""
    _require_consistent(state, hp)
    counters = counters or MoveCounters()
    D = _kernels.dist_matrix(state.Z)
    g_max = hp.resolve_g_max(net.n)
    beta, G = _kernels.sweep(
        state.Z, D, net.adjacency, state.K, state.stats.counts,
        state.stats.S, state.stats.Q, state.beta, state.G,
        net.directed, g_max, hp.d, hp.alpha, hp.delta, hp.nu, hp.omega2,
        hp.xi, hp.psi, hp.sigma_z2, hp.sigma_beta2, hp.a_eject,
        compact, rng, counters.table)
    state.beta = float(beta)
    state.G = int(G)
    return state


def initial_state(net: Network, hp: Hyperparams,
                  rng: np.random.Generator) -> ChainState:
    """Neutral start: Z ~ N(0, 4 I), beta from its prior, one component."""
    Z = 2.0 * rng.standard_normal((net.n, hp.d))
    beta = hp.xi + math.sqrt(hp.psi) * rng.standard_normal()
    K = np.zeros(net.n, dtype=np.int64)
    return ChainState.initial(Z, beta, K, 1, hp.resolve_g_max(net.n))


def run_chain(net: Network, hp: Hyperparams, cfg: RunConfig,
              compact: bool = True) -> Tuple[List[DrawRecord], MoveCounters]:
    """Run the sampler, returning retained draws and move counters."""
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    state = initial_state(net, hp, rng)
    g_max = hp.resolve_g_max(net.n)
    n, d = net.n, hp.d
    counters = MoveCounters()
    n_rec = (cfg.iterations - cfg.burnin) // cfg.thin
    rec_iter = np.zeros(n_rec, dtype=np.int64)
    rec_G = np.zeros(n_rec, dtype=np.int64)
    rec_beta = np.zeros(n_rec)
    rec_loglik = np.zeros(n_rec)
    rec_logpost = np.zeros(n_rec)
    rec_K = np.zeros((n_rec, n), dtype=np.int64)
    rec_Z = np.zeros((n_rec, n, d))
    D = _kernels.dist_matrix(state.Z)
    _kernels.run_sweeps(
        state.Z, D, net.adjacency, state.K, state.stats.counts,
        state.stats.S, state.stats.Q, state.beta, state.G,
        net.directed, g_max, hp.d, hp.alpha, hp.delta, hp.nu, hp.omega2,
        hp.xi, hp.psi, hp.sigma_z2, hp.sigma_beta2, hp.a_eject, compact,
        cfg.iterations, cfg.burnin, cfg.thin, rng, counters.table,
        rec_iter, rec_G, rec_beta, rec_loglik, rec_logpost, rec_K, rec_Z)
    draws = [DrawRecord(int(rec_iter[r]), int(rec_G[r]), float(rec_beta[r]),
                        rec_K[r].copy(), rec_Z[r].copy(),
                        float(rec_loglik[r]), float(rec_logpost[r]))
             for r in range(n_rec)]
    return draws, counters
