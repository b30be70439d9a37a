"""Collapsed latent position cluster model for networks."""

from ._kernels import NUMBA_ENABLED
from .model import (
    ChainState,
    ClusterStats,
    Hyperparams,
    Network,
    NumericDomainError,
    log_beta_prior,
    log_cluster_term,
    log_collapsed_posterior,
    log_K_G_terms,
    log_likelihood,
    stats_add,
    stats_remove,
)
from .sampler import (
    DrawRecord,
    MoveCounters,
    RunConfig,
    run_chain,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "ChainState", "ClusterStats", "Hyperparams", "Network",
    "NumericDomainError", "NUMBA_ENABLED",
    "log_beta_prior", "log_cluster_term", "log_collapsed_posterior",
    "log_K_G_terms", "log_likelihood", "stats_add", "stats_remove",
    "DrawRecord", "MoveCounters", "RunConfig", "run_chain", "sweep",
    "__version__",
]
