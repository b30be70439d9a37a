"""Two-stage BIC baseline for choosing G, for comparison with the sampler.

Stage one fits the intercept by maximum likelihood conditional on a fixed
position estimate; stage two fits a spherical Gaussian mixture to those
positions.  The position estimate is the highest-likelihood aligned draw
(a documented proxy for the minimum-KL estimate, recorded in the report).
"""

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.special import logsumexp

from .model import Hyperparams, Network, log_likelihood
from .postprocess import AlignedDraws

POSITION_PROXY_NOTE = ("position estimate: highest-likelihood aligned draw "
                       "(proxy for the minimum-KL estimate); n_lr = tie "
                       "count, not dyad count")


class BoundaryMLEError(RuntimeError):
    """The intercept MLE lies at infinity (all ties or no ties)."""


class DegenerateFitError(RuntimeError):
    """Every mixture-fit restart collapsed a component."""


@dataclass
class BicReport:
    """Per-G baseline fit; bic is latentnet-style (lower is better)."""

    G: int
    bic_lr: float
    bic_lp: float
    total: float
    bic: float
    beta_hat: float
    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    note: str = POSITION_PROXY_NOTE

    @property
    def degenerate(self) -> bool:
        return not math.isfinite(self.bic)

    def to_dict(self) -> dict:
        if self.degenerate:
            return {"G": self.G, "degenerate": True, "note": self.note}
        return {"G": self.G, "bic_lr": self.bic_lr, "bic_lp": self.bic_lp,
                "total": self.total, "bic": self.bic,
                "beta_hat": self.beta_hat,
                "weights": self.weights.tolist(),
                "means": self.means.tolist(),
                "variances": self.variances.tolist(),
                "note": self.note}


def point_estimate_positions(aligned: AlignedDraws) -> np.ndarray:
    """The aligned draw with the highest log-likelihood."""
    if aligned.Z_aligned.shape[0] == 0:
        raise ValueError("no draws available")
    return aligned.Z_aligned[aligned.reference].copy()


def bic_lr(net: Network, Z_hat: np.ndarray,
           hp: Hyperparams) -> Tuple[float, float]:
    """Logistic-regression BIC: 2 logL(beta_hat) - d_lr log(n_lr)."""
    n_lr = net.n_ties
    n_dyads = net.n * (net.n - 1) if net.directed \
        else net.n * (net.n - 1) // 2
    if n_lr == 0 or n_lr == n_dyads:
        raise BoundaryMLEError(
            f"degenerate network ({n_lr} of {n_dyads} dyads tied): "
            f"the intercept MLE is not finite")
    Z_hat = np.asarray(Z_hat, dtype=float)
    D = np.sqrt(((Z_hat[:, None, :] - Z_hat[None, :, :]) ** 2).sum(axis=2))
    if net.directed:
        mask = ~np.eye(net.n, dtype=bool)
    else:
        mask = np.triu(np.ones((net.n, net.n), dtype=bool), 1)
    y = net.adjacency[mask].astype(float)
    dist = D[mask]
    beta = 0.0
    for _ in range(100):
        p = 1.0 / (1.0 + np.exp(-(beta - dist)))
        grad = float((y - p).sum())
        if abs(grad) < 1e-10:
            break
        hess = -float((p * (1.0 - p)).sum())
        beta -= grad / hess
    else:
        raise RuntimeError(f"intercept Newton iteration did not converge "
                           f"(|gradient| = {abs(grad):.3e})")
    value = 2.0 * log_likelihood(net, Z_hat, beta) - 1.0 * math.log(n_lr)
    return value, float(beta)


def _kmeans(X, G, rng, n_iter=50):
    n = X.shape[0]
    centres = X[rng.choice(n, size=G, replace=False)].copy()
    labels = np.zeros(n, dtype=int)
    for _ in range(n_iter):
        dist = ((X[:, None, :] - centres[None, :, :]) ** 2).sum(axis=2)
        new = dist.argmin(axis=1)
        if np.array_equal(new, labels):
            break
        labels = new
        for g in range(G):
            mask = labels == g
            if mask.any():
                centres[g] = X[mask].mean(axis=0)
    return centres


def _em_spherical(X, G, centres, tol=1e-8, max_iter=500):
    """EM for a G-component spherical mixture; returns (loglik, theta)."""
    n, d = X.shape
    weights = np.full(G, 1.0 / G)
    means = centres.copy()
    var = np.full(G, max(X.var(), 1e-4))
    prev = -np.inf
    for _ in range(max_iter):
        sq = ((X[:, None, :] - means[None, :, :]) ** 2).sum(axis=2)
        logp = (np.log(weights)[None, :]
                - 0.5 * d * np.log(2 * math.pi * var)[None, :]
                - 0.5 * sq / var[None, :])
        norm = logsumexp(logp, axis=1)
        loglik = float(norm.sum())
        assert loglik >= prev - 1e-8, "EM log-likelihood decreased"
        resp = np.exp(logp - norm[:, None])
        nk = resp.sum(axis=0)
        if (nk < 1e-10).any():
            return None
        weights = nk / n
        means = (resp.T @ X) / nk[:, None]
        sq = ((X[:, None, :] - means[None, :, :]) ** 2).sum(axis=2)
        var = (resp * sq).sum(axis=0) / (d * nk)
        if (var < 1e-8).any():
            return None
        if loglik - prev < tol and math.isfinite(prev):
            break
        prev = loglik
    return loglik, weights, means, var


def bic_lp(Z_hat: np.ndarray, G: int, hp: Hyperparams,
           n_restarts: int = 10, seed: int = 0):
    """Latent-position BIC: 2 logL(theta_hat) - d_lp log(n)."""
    X = np.asarray(Z_hat, dtype=float)
    n, d = X.shape
    if not 1 <= G <= n:
        raise ValueError(f"G must lie in 1..{n}")
    best = None
    for r in range(n_restarts):
        rng = np.random.default_rng(seed + r)
        centres = _kmeans(X, G, rng)
        fit = _em_spherical(X, G, centres)
        if fit is None:
            continue
        if best is None or fit[0] > best[0]:
            best = fit
    if best is None:
        raise DegenerateFitError(
            f"all {n_restarts} mixture restarts collapsed a component")
    loglik, weights, means, var = best
    d_lp = (G - 1) + G * d + G
    value = 2.0 * loglik - d_lp * math.log(n)
    return value, (weights, means, var)


def build_report(net: Network, aligned: AlignedDraws, hp: Hyperparams,
                 g_cap: int, seed: int = 0) -> List[BicReport]:
    Z_hat = point_estimate_positions(aligned)
    lr_val, beta_hat = bic_lr(net, Z_hat, hp)
    reports = []
    for G in range(1, g_cap + 1):
        try:
            lp_val, (weights, means, var) = bic_lp(Z_hat, G, hp, seed=seed)
        except DegenerateFitError as exc:
            reports.append(BicReport(
                G=G, bic_lr=lr_val, bic_lp=-math.inf, total=-math.inf,
                bic=math.inf, beta_hat=beta_hat, weights=np.array([]),
                means=np.zeros((0, hp.d)), variances=np.array([]),
                note=f"degenerate fit: {exc}"))
            continue
        total = lr_val + lp_val
        reports.append(BicReport(G=G, bic_lr=lr_val, bic_lp=lp_val,
                                 total=total, bic=-total, beta_hat=beta_hat,
                                 weights=weights, means=means, variances=var))
    return reports


def select_model(reports: List[BicReport]) -> int:
    """G with the lowest reported BIC; ties go to the smaller G."""
    valid = [r for r in reports if not r.degenerate]
    if not valid:
        raise ValueError("no usable reports")
    best = min(valid, key=lambda r: (r.bic, r.G))
    return best.G
