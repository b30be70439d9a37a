"""Synthetic networks from the latent position cluster generative process."""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import numpy as np

from .model import Network


@dataclass
class GenSpec:
    """Generative settings: mixture in latent space plus the logistic link.

    Sampling is fully determined by the seed: allocations by inverse-CDF
    on uniform draws, positions via standard normals, edges by comparing
    uniforms against the link probabilities (row-major dyad order).
    """

    n: int
    d: int
    g_true: int
    weights: list
    means: list                    # (g_true, d)
    variances: list                # (g_true,)
    beta: float
    directed: bool = False
    seed: int = 0

    def __post_init__(self):
        self.weights = [float(w) for w in self.weights]
        if self.g_true < 1:
            raise ValueError("g_true must be >= 1")
        if len(self.weights) != self.g_true:
            raise ValueError("weights length must equal g_true")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")
        if len(self.means) != self.g_true:
            raise ValueError("means must have g_true rows")
        if len(self.variances) != self.g_true or min(self.variances) <= 0:
            raise ValueError("variances must be g_true positive values")

    @classmethod
    def from_json(cls, path) -> "GenSpec":
        return cls(**json.loads(Path(path).read_text()))

    def to_json(self, path):
        obj = {"n": self.n, "d": self.d, "g_true": self.g_true,
               "weights": self.weights,
               "means": [list(map(float, m)) for m in self.means],
               "variances": [float(v) for v in self.variances],
               "beta": self.beta, "directed": self.directed,
               "seed": self.seed}
        Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def sample_network(spec: GenSpec) -> Tuple[Network, np.ndarray, np.ndarray]:
    """Draw (Network, Z_true, K_true) from the generative model."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    cum = np.cumsum(spec.weights)
    u = rng.random(spec.n)
    K = np.searchsorted(cum, u).astype(np.int64)
    K[K >= spec.g_true] = spec.g_true - 1
    means = np.asarray(spec.means, dtype=float)
    sds = np.sqrt(np.asarray(spec.variances, dtype=float))
    Z = means[K] + sds[K, None] * rng.standard_normal((spec.n, spec.d))
    D = np.sqrt(((Z[:, None, :] - Z[None, :, :]) ** 2).sum(axis=2))
    P = 1.0 / (1.0 + np.exp(-(spec.beta - D)))
    U = rng.random((spec.n, spec.n))
    Y = np.zeros((spec.n, spec.n), dtype=np.int64)
    if spec.directed:
        Y[U < P] = 1
        np.fill_diagonal(Y, 0)
    else:
        upper = np.triu(U < P, 1)
        Y = (upper | upper.T).astype(np.int64)
    return Network(Y, directed=spec.directed), Z, K
