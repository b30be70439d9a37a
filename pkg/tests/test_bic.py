"""Tests for the two-stage BIC baseline."""

import math

import numpy as np
import pytest
from scipy.special import logsumexp

from clpcm import Hyperparams, Network
from clpcm.bic import (
    BicReport,
    BoundaryMLEError,
    bic_lp,
    bic_lr,
    point_estimate_positions,
    select_model,
)
from clpcm.postprocess import align_draws
from clpcm.sampler import DrawRecord


def mixture_loglik(X, weights, means, var):
    d = X.shape[1]
    sq = ((X[:, None, :] - means[None, :, :]) ** 2).sum(axis=2)
    logp = (np.log(weights)[None, :]
            - 0.5 * d * np.log(2 * math.pi * var)[None, :]
            - 0.5 * sq / var[None, :])
    return float(logsumexp(logp, axis=1).sum())


# ------------------------------------------------------------- bic_lr

def test_beta_hat_equals_common_distance_at_half_density():
    # two actors at distance d0, one of the two directed dyads tied:
    # the empirical rate 1/2 forces logit(1/2) = beta - d0 = 0
    d0 = 2.0
    Z = np.array([[0.0, 0.0], [d0, 0.0]])
    net = Network(np.array([[0, 1], [0, 0]]), directed=True)
    val, beta_hat = bic_lr(net, Z, Hyperparams())
    assert beta_hat == pytest.approx(d0, abs=1e-8)
    assert val == pytest.approx(2 * (math.log(0.5) * 2) - math.log(1), abs=1e-6)


def test_bic_lr_boundary_error_when_no_ties():
    net = Network(np.zeros((4, 4), dtype=int), directed=True)
    with pytest.raises(BoundaryMLEError):
        bic_lr(net, np.random.default_rng(0).standard_normal((4, 2)),
               Hyperparams())


def test_beta_hat_matches_grid_search():
    rng = np.random.default_rng(1)
    n = 6
    Y = rng.integers(0, 2, size=(n, n))
    np.fill_diagonal(Y, 0)
    net = Network(Y, directed=True)
    Z = rng.standard_normal((n, 2))
    _, beta_hat = bic_lr(net, Z, Hyperparams())

    D = np.sqrt(((Z[:, None] - Z[None, :]) ** 2).sum(axis=2))
    mask = ~np.eye(n, dtype=bool)
    y, dist = Y[mask], D[mask]

    def ll(b):
        eta = b - dist
        return float((y * eta - np.logaddexp(0, eta)).sum())

    lo, hi = -20.0, 20.0
    for _ in range(4):  # progressive grid refinement to ~1e-6
        grid = np.linspace(lo, hi, 2001)
        vals = [ll(b) for b in grid]
        k = int(np.argmax(vals))
        lo, hi = grid[max(0, k - 1)], grid[min(len(grid) - 1, k + 1)]
    best = 0.5 * (lo + hi)
    assert beta_hat == pytest.approx(best, abs=1e-5)


def test_bic_lr_rigid_motion_invariant():
    rng = np.random.default_rng(2)
    n = 6
    Y = rng.integers(0, 2, size=(n, n))
    np.fill_diagonal(Y, 0)
    net = Network(Y, directed=True)
    Z = rng.standard_normal((n, 2))
    theta = 0.7
    R = np.array([[math.cos(theta), -math.sin(theta)],
                  [math.sin(theta), math.cos(theta)]])
    v1, b1 = bic_lr(net, Z, Hyperparams())
    v2, b2 = bic_lr(net, Z @ R + np.array([3.0, -1.0]), Hyperparams())
    assert v1 == pytest.approx(v2, abs=1e-8)
    assert b1 == pytest.approx(b2, abs=1e-8)


# ------------------------------------------------------------- bic_lp

def test_single_component_closed_form():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((10, 2)) * 1.3 + 0.4
    val, (w, mu, var) = bic_lp(X, 1, Hyperparams())
    mu_hat = X.mean(axis=0)
    var_hat = ((X - mu_hat) ** 2).sum() / (2 * 10)
    assert np.allclose(mu[0], mu_hat, atol=1e-8)
    assert var[0] == pytest.approx(var_hat, abs=1e-8)
    expected_ll = mixture_loglik(X, np.array([1.0]), mu_hat[None, :],
                                 np.array([var_hat]))
    d_lp = 0 + 1 * 2 + 1
    assert val == pytest.approx(2 * expected_ll - d_lp * math.log(10),
                                abs=1e-6)


def test_two_separated_clouds():
    rng = np.random.default_rng(4)
    a = rng.standard_normal((12, 2)) * 0.2 + np.array([-5.0, 0.0])
    b = rng.standard_normal((12, 2)) * 0.2 + np.array([5.0, 0.0])
    X = np.vstack([a, b])
    _, (w, mu, var) = bic_lp(X, 2, Hyperparams())
    order = np.argsort(mu[:, 0])
    assert np.allclose(mu[order][0], a.mean(axis=0), atol=0.05)
    assert np.allclose(mu[order][1], b.mean(axis=0), atol=0.05)
    assert np.allclose(w, 0.5, atol=1e-6)


def test_em_beats_random_parameter_search():
    rng = np.random.default_rng(5)
    X = rng.standard_normal((8, 2))
    val, (w, mu, var) = bic_lp(X, 2, Hyperparams())
    em_ll = mixture_loglik(X, w, mu, var)
    best_random = -np.inf
    for _ in range(100_000):
        wr = rng.dirichlet([1.0, 1.0])
        mur = rng.standard_normal((2, 2)) * 2
        varr = rng.uniform(0.05, 4.0, size=2)
        best_random = max(best_random, mixture_loglik(X, wr, mur, varr))
    assert em_ll >= best_random


def test_bic_lp_dimension_penalty_formula():
    rng = np.random.default_rng(6)
    X = rng.standard_normal((9, 2))
    for G in (1, 2, 3):
        val, (w, mu, var) = bic_lp(X, G, Hyperparams())
        d_lp = (G - 1) + G * 2 + G
        assert d_lp == G * (2 + 2) - 1
        ll = mixture_loglik(X, w, mu, var)
        assert val == pytest.approx(2 * ll - d_lp * math.log(9), abs=1e-8)


# -------------------------------------------------------- select_model

def _report(G, bic):
    return BicReport(G=G, bic_lr=0.0, bic_lp=0.0, total=-bic, bic=bic,
                     beta_hat=0.0, weights=np.ones(G) / G,
                     means=np.zeros((G, 2)), variances=np.ones(G))


def test_select_model():
    assert select_model([_report(2, 50.0)]) == 2
    reports = [_report(2, 100.0), _report(3, 90.0), _report(4, 95.0)]
    assert select_model(reports) == 3
    ties = [_report(2, 90.0), _report(3, 90.0)]
    assert select_model(ties) == 2


# --------------------------------------------- point estimate proxy

def test_point_estimate_is_best_likelihood_draw():
    rng = np.random.default_rng(7)
    draws = [DrawRecord(t + 1, 1, 0.0, np.zeros(4, dtype=np.int64),
                        rng.standard_normal((4, 2)), float(-t), 0.0)
             for t in range(5)]
    aligned = align_draws(draws)
    Z_hat = point_estimate_positions(aligned)
    assert np.allclose(Z_hat, aligned.Z_aligned[0])


def test_point_estimate_likelihood_beats_random_rigid_perturbations():
    rng = np.random.default_rng(8)
    n = 8
    Y = rng.integers(0, 2, size=(n, n))
    np.fill_diagonal(Y, 0)
    net = Network(Y, directed=True)
    from clpcm import log_likelihood
    draws = []
    for t in range(20):
        Z = rng.standard_normal((n, 2))
        draws.append(DrawRecord(t + 1, 1, 0.0, np.zeros(n, dtype=np.int64),
                                Z, log_likelihood(net, Z, 0.0), 0.0))
    aligned = align_draws(draws)
    Z_hat = point_estimate_positions(aligned)
    ll_hat = log_likelihood(net, Z_hat, 0.0)
    assert ll_hat == pytest.approx(max(d.log_likelihood for d in draws),
                                   abs=1e-9)
    # rigid perturbations of any draw cannot beat the proxy by more than 2%
    # in log-likelihood (they leave each draw's value unchanged exactly)
    worst = -np.inf
    for _ in range(10_000):
        theta = rng.uniform(0, 2 * math.pi)
        R = np.array([[math.cos(theta), -math.sin(theta)],
                      [math.sin(theta), math.cos(theta)]])
        cand = draws[int(rng.integers(0, 20))].Z @ R + rng.standard_normal(2)
        worst = max(worst, log_likelihood(net, cand, 0.0))
    assert ll_hat >= worst + 0.02 * worst  # both negative: within 2%
