"""Domain types and log-density terms of the collapsed latent position
cluster model.

All densities are evaluated in log space.  The collapsed posterior over
(Z, beta, K, G) factorises into the dyadic log-likelihood, one term per
cluster driven by the sufficient statistics (n_g, s_g, q_g), a block of
allocation/component-count terms, the intercept prior and a constant.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import _kernels


class NumericDomainError(ArithmeticError):
    """A log-density argument left its domain (corrupted statistics)."""


SCALE_SLACK = 1e-12


@dataclass
class Network:
    """Binary adjacency data with a directedness flag.

    adjacency is an n x n 0/1 matrix with zero diagonal; undirected
    networks must be symmetric.
    """

    adjacency: np.ndarray
    directed: bool = False
    labels: Optional[Sequence[str]] = None

    def __post_init__(self):
        Y = np.asarray(self.adjacency)
        if Y.ndim != 2 or Y.shape[0] != Y.shape[1]:
            raise ValueError("adjacency must be a square matrix")
        if not np.isin(Y, (0, 1)).all():
            raise ValueError("adjacency entries must be 0 or 1")
        if np.diagonal(Y).any():
            raise ValueError("adjacency diagonal must be zero (no self-ties)")
        if not self.directed and not np.array_equal(Y, Y.T):
            raise ValueError("undirected network requires a symmetric adjacency")
        if self.labels is not None and len(self.labels) != Y.shape[0]:
            raise ValueError("labels length must match actor count")
        self.adjacency = Y.astype(np.int64)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def n_ties(self) -> int:
        """Tie count: each dyad once for undirected, ordered for directed."""
        if self.directed:
            return int(self.adjacency.sum())
        return int(self.adjacency.sum()) // 2


@dataclass
class Hyperparams:
    """Model hyperparameters and sampler tuning constants.

    Defaults follow the standard choices: xi=0, psi=2, alpha=2,
    delta=0.103, nu=3, omega2=10, latent dimension 2.  g_max left unset
    resolves to floor(n/2) for the network at hand.
    """

    xi: float = 0.0
    psi: float = 2.0
    alpha: float = 2.0
    delta: float = 0.103
    nu: float = 3.0
    omega2: float = 10.0
    d: int = 2
    g_max: Optional[int] = None
    sigma_z2: float = 1.0
    sigma_beta2: float = 0.5
    a_eject: float = 1.0

    def __post_init__(self):
        for name in ("psi", "alpha", "delta", "nu", "omega2",
                     "sigma_z2", "sigma_beta2", "a_eject"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.d < 1:
            raise ValueError("latent dimension d must be >= 1")
        if self.g_max is not None and self.g_max < 1:
            raise ValueError("g_max must be >= 1")

    def resolve_g_max(self, n: int) -> int:
        if self.g_max is not None:
            return self.g_max
        return max(1, n // 2)


class ClusterEntry(NamedTuple):
    n_g: int
    s_g: np.ndarray
    q_g: float


class ClusterStats:
    """Per-cluster sufficient statistics (n_g, s_g, q_g), maintained in O(d)."""

    def __init__(self, g_max: int, d: int):
        self.counts = np.zeros(g_max, dtype=np.int64)
        self.S = np.zeros((g_max, d), dtype=np.float64)
        self.Q = np.zeros(g_max, dtype=np.float64)

    @classmethod
    def from_allocations(cls, Z: np.ndarray, K: np.ndarray, g_max: int) -> "ClusterStats":
        Z = np.asarray(Z, dtype=np.float64)
        stats = cls(g_max, Z.shape[1])
        _kernels.recompute_stats(Z, np.asarray(K, dtype=np.int64),
                                 stats.counts, stats.S, stats.Q)
        return stats

    def entry(self, g: int) -> ClusterEntry:
        return ClusterEntry(int(self.counts[g]), self.S[g].copy(), float(self.Q[g]))

    def copy(self) -> "ClusterStats":
        out = ClusterStats(self.counts.shape[0], self.S.shape[1])
        out.counts[:] = self.counts
        out.S[:] = self.S
        out.Q[:] = self.Q
        return out


def stats_add(stats: ClusterStats, g: int, z: np.ndarray) -> ClusterStats:
    """Add one actor's position to cluster g."""
    z = np.asarray(z, dtype=np.float64)
    stats.counts[g] += 1
    stats.S[g] += z
    stats.Q[g] += float(z @ z)
    return stats


def stats_remove(stats: ClusterStats, g: int, z: np.ndarray) -> ClusterStats:
    """Remove one actor's position from cluster g."""
    if stats.counts[g] < 1:
        raise ValueError(f"cannot remove from empty cluster {g}")
    z = np.asarray(z, dtype=np.float64)
    stats.counts[g] -= 1
    stats.S[g] -= z
    stats.Q[g] -= float(z @ z)
    return stats


@dataclass
class ChainState:
    """Current sampler state: positions, intercept, allocations, G, stats."""

    Z: np.ndarray
    beta: float
    K: np.ndarray
    G: int
    stats: ClusterStats = field(repr=False, default=None)

    def __post_init__(self):
        self.Z = np.asarray(self.Z, dtype=np.float64)
        self.K = np.asarray(self.K, dtype=np.int64)
        if self.K.min() < 0 or self.K.max() >= self.G:
            raise ValueError("allocations must lie in {0..G-1}")

    @classmethod
    def initial(cls, Z, beta, K, G, g_max) -> "ChainState":
        state = cls(np.asarray(Z, dtype=np.float64), float(beta),
                    np.asarray(K, dtype=np.int64), int(G))
        state.stats = ClusterStats.from_allocations(state.Z, state.K, g_max)
        return state


def log_likelihood(net: Network, Z: np.ndarray, beta: float) -> float:
    """Dyadic logistic log-likelihood; each dyad once if undirected."""
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim != 2 or Z.shape[0] != net.n:
        raise ValueError(f"Z must have {net.n} rows, got shape {Z.shape}")
    D = _kernels.dist_matrix(Z)
    return float(_kernels.loglik_full(D, net.adjacency, float(beta), net.directed))


def log_cluster_term(entry: ClusterEntry, hp: Hyperparams) -> float:
    """Collapsed per-cluster term from the sufficient statistics."""
    n_g, s_g, q_g = entry
    s2 = float(np.dot(s_g, s_g))
    arg = _kernels.cluster_scale_arg(n_g, s2, q_g, hp.delta, hp.omega2)
    if arg <= 0.0 or (q_g - s2 / (n_g + 1.0 / hp.omega2)) < -SCALE_SLACK:
        raise NumericDomainError(
            f"cluster scale term non-positive beyond slack (arg={arg})")
    return float(_kernels.cluster_term(n_g, s2, q_g, hp.d,
                                       hp.alpha, hp.delta, hp.omega2))


def log_K_G_terms(K: np.ndarray, G: int, hp: Hyperparams, n: int) -> float:
    """Allocation-vector, weight-integral and component-count prior terms."""
    K = np.asarray(K, dtype=np.int64)
    counts = np.bincount(K, minlength=G).astype(np.int64)
    return float(_kernels.kg_terms(counts, G, n, hp.d,
                                   hp.alpha, hp.delta, hp.nu, hp.omega2))


def log_beta_prior(beta: float, hp: Hyperparams) -> float:
    return -0.5 * math.log(2.0 * math.pi * hp.psi) \
        - (beta - hp.xi) ** 2 / (2.0 * hp.psi)


def log_collapsed_posterior(state: ChainState, net: Network,
                            hp: Hyperparams) -> float:
    """Unnormalised collapsed log-posterior of (Z, beta, K, G).

    Equal to the true log posterior up to an additive constant independent
    of the state (the truncation constant of the component-count prior is
    dropped; it cancels in every ratio the sampler uses).
    """
    v = log_likelihood(net, state.Z, state.beta)
    for g in range(state.G):
        v += log_cluster_term(state.stats.entry(g), hp)
    v += log_K_G_terms(state.K, state.G, hp, net.n)
    v += log_beta_prior(state.beta, hp)
    v += -(hp.d * net.n / 2.0) * math.log(math.pi)
    return v
