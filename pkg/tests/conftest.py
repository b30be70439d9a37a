"""Shared fixtures: full-scale chain runs reused across test modules."""

import time

import pytest

from clpcm import Hyperparams, RunConfig, run_chain
from clpcm import io


@pytest.fixture(scope="session")
def monks_run():
    """Sampson's monks at the published settings: 100k sweeps, thin 10,
    sigma_z2=0.7, sigma_beta2=0.5.  Returns (net, draws, counters, seconds)."""
    net = io.ingest(io.dataset_path("monks"), "edgelist", directed=True)
    hp = Hyperparams(sigma_z2=0.7, sigma_beta2=0.5)
    cfg = RunConfig(iterations=100_000, burnin=10_000, thin=10, seed=1)
    t0 = time.perf_counter()
    draws, counters = run_chain(net, hp, cfg)
    elapsed = time.perf_counter() - t0
    return net, hp, draws, counters, elapsed
