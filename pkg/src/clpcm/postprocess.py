"""Identifiability post-processing and posterior summaries.

The likelihood is invariant to rigid motions of the latent space and to
cluster relabelling, so retained draws are (a) Procrustes-aligned to the
highest-likelihood draw and (b) relabelled, within each visited G, by
optimal assignment against an iteratively refined reference allocation.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .sampler import DrawRecord, MoveCounters


@dataclass
class AlignedDraws:
    """Draws after alignment and label-unswitching."""

    reference: int
    iterations: np.ndarray
    Gs: np.ndarray
    betas: np.ndarray
    logliks: np.ndarray
    logposts: np.ndarray
    Z_aligned: np.ndarray          # (n_draws, n, d)
    K_relabel: np.ndarray          # (n_draws, n)
    K_raw: np.ndarray = field(repr=False, default=None)


@dataclass
class RunSummary:
    """Posterior summaries: pi(G|Y), per-G means and memberships, rates."""

    model_probabilities: Dict[int, float]
    acceptance_rates: Dict[str, float]
    counters: Dict[str, Dict[str, int]]
    beta_mean: float
    beta_sd: float
    reference_iteration: int
    per_G: Dict[int, dict]

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "model_probabilities": {str(k): v for k, v in
                                    sorted(self.model_probabilities.items())},
            "acceptance_rates": self.acceptance_rates,
            "counters": self.counters,
            "beta_mean": self.beta_mean,
            "beta_sd": self.beta_sd,
            "reference_iteration": self.reference_iteration,
            "per_G": {str(k): v for k, v in sorted(self.per_G.items())},
        }


def procrustes_align(Z: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Best rigid transform (rotation/reflection + translation) of Z onto ref.

    Distances are preserved exactly; degenerate configurations (all points
    coincident) get a translation-only alignment.
    """
    Z = np.asarray(Z, dtype=float)
    ref = np.asarray(ref, dtype=float)
    if Z.shape != ref.shape:
        raise ValueError("Z and ref must have the same shape")
    if Z.shape[0] < 2:
        raise ValueError("alignment needs at least two points")
    mz = Z.mean(axis=0)
    mr = ref.mean(axis=0)
    Zc = Z - mz
    if not Zc.any():
        return Z - mz + mr
    U, _, Vt = np.linalg.svd(Zc.T @ (ref - mr))
    R = U @ Vt
    return Zc @ R + mr


def _assignment_permutation(K: np.ndarray, ref_K: np.ndarray,
                            G: int, G_ref: int) -> np.ndarray:
    """Label permutation maximising agreement with the reference."""
    side = max(G, G_ref)
    cost = np.zeros((side, side))
    for g in range(G):
        mask = K == g
        for h in range(G_ref):
            cost[g, h] = -np.count_nonzero(ref_K[mask] == h)
    # break exact ties toward keeping labels so converged states are fixed
    cost[np.diag_indices(side)] -= 1e-9
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(side, dtype=np.int64)
    perm[rows] = cols
    return perm


def relabel(Ks: List[np.ndarray], ref_K: np.ndarray,
            max_rounds: int = 10) -> List[np.ndarray]:
    """Relabel each allocation against ref_K, then iterate with the modal
    relabelled allocation until permutations stabilise."""
    Ks = [np.asarray(K, dtype=np.int64) for K in Ks]
    ref = np.asarray(ref_K, dtype=np.int64)
    gmax = max(int(K.max()) + 1 for K in Ks)
    out = list(Ks)
    prev_perms = None
    for _ in range(max_rounds):
        G_ref = int(ref.max()) + 1
        perms = []
        new = []
        for K in Ks:
            G = int(K.max()) + 1
            perm = _assignment_permutation(K, ref, G, G_ref)
            perms.append(tuple(perm))
            new.append(perm[K])
        out = new
        if perms == prev_perms:
            break
        prev_perms = perms
        # modal relabelled allocation as the next reference
        stacked = np.stack(out)
        ref = np.array([np.bincount(stacked[:, i], minlength=gmax).argmax()
                        for i in range(stacked.shape[1])], dtype=np.int64)
    return out


def align_draws(draws: List[DrawRecord]) -> AlignedDraws:
    """Procrustes-align all draws to the highest-likelihood draw and
    unswitch labels within each visited G."""
    if not draws:
        raise ValueError("no draws to align")
    logliks = np.array([d.log_likelihood for d in draws])
    ref_idx = int(np.argmax(logliks))  # ties: earliest iteration
    ref_Z = draws[ref_idx].Z
    Zs = np.stack([procrustes_align(d.Z, ref_Z) for d in draws])
    Gs = np.array([d.G for d in draws], dtype=np.int64)
    K_raw = np.stack([d.K for d in draws])
    K_rel = K_raw.copy()
    for G in np.unique(Gs):
        idx = np.nonzero(Gs == G)[0]
        # reference allocation: highest-likelihood draw among this G
        ref_local = idx[np.argmax(logliks[idx])]
        relabelled = relabel([K_raw[i] for i in idx], K_raw[ref_local])
        for i, K in zip(idx, relabelled):
            K_rel[i] = K
    return AlignedDraws(
        reference=ref_idx,
        iterations=np.array([d.iteration for d in draws], dtype=np.int64),
        Gs=Gs,
        betas=np.array([d.beta for d in draws]),
        logliks=logliks,
        logposts=np.array([d.log_posterior for d in draws]),
        Z_aligned=Zs,
        K_relabel=K_rel,
        K_raw=K_raw,
    )


def model_probabilities(Gs) -> Dict[int, float]:
    """Empirical pi(G|Y) over retained draws."""
    Gs = np.asarray(Gs)
    if Gs.size == 0:
        raise ValueError("no draws")
    vals, counts = np.unique(Gs, return_counts=True)
    return {int(g): float(c) / Gs.size for g, c in zip(vals, counts)}


def summarize(aligned: AlignedDraws, counters: Optional[MoveCounters] = None,
              mass_threshold: float = 0.01) -> RunSummary:
    """Posterior means, membership probabilities and acceptance rates."""
    probs = model_probabilities(aligned.Gs)
    n = aligned.Z_aligned.shape[1]
    per_G = {}
    for G, mass in probs.items():
        if mass < mass_threshold:
            continue
        idx = np.nonzero(aligned.Gs == G)[0]
        mean_Z = aligned.Z_aligned[idx].mean(axis=0)
        P = np.zeros((n, G))
        for i in idx:
            K = aligned.K_relabel[i]
            P[np.arange(n), K] += 1.0
        P /= len(idx)
        per_G[int(G)] = {
            "mass": float(mass),
            "n_draws": int(len(idx)),
            "mean_Z": mean_Z.tolist(),
            "membership": P.tolist(),
        }
    rates = {}
    table = {}
    if counters is not None:
        rates = {m: (None if np.isnan(r) else float(r))
                 for m, r in counters.rates().items()}
        from .io import counters_dict
        table = counters_dict(counters)
    betas = aligned.betas
    return RunSummary(
        model_probabilities=probs,
        acceptance_rates=rates,
        counters=table,
        beta_mean=float(betas.mean()),
        beta_sd=float(betas.std(ddof=1)) if betas.size > 1 else 0.0,
        reference_iteration=int(aligned.iterations[aligned.reference]),
        per_G=per_G,
    )
