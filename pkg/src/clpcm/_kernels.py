"""Hot numeric kernels for the collapsed sampler.

Every function here is written to run either JIT-compiled by numba or as
plain Python over numpy arrays.  The path is chosen once at import time:
set ``CLPCM_DISABLE_NUMBA=1`` to force the pure-Python fallback.  Both
paths consume the ``numpy.random.Generator`` stream through the same call
sequence and produce bit-identical results (covered by tests).

State layout shared by all kernels (0-based cluster labels):
  Z       (n, d) float64   latent positions
  D       (n, n) float64   pairwise Euclidean distances, kept in sync with Z
  Y       (n, n) int64     adjacency
  K       (n,)   int64     allocations in {0..G-1}
  counts  (gmax,) int64    per-cluster sizes
  S       (gmax, d) float64  per-cluster position sums
  Q       (gmax,) float64  per-cluster squared norms
  counters (8, 2) int64    rows: Z, beta, gibbs, move1, move2, move3,
                           eject, absorb; columns: attempted, accepted

RNG stream order per sweep (the reproducibility contract, see README):
positions (per actor: d normals + 1 uniform), intercept (1 normal +
1 uniform), gibbs (1 uniform per actor), move1, move2, move3, then
eject-or-absorb.  Moves skipped because G < 2 (or gmax == 1) consume no
draws.
"""

import math
import os

import numpy as np

_DISABLE = os.environ.get("CLPCM_DISABLE_NUMBA", "0").lower() in ("1", "true", "yes")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_ENABLED = numba is not None and not _DISABLE

if NUMBA_ENABLED:
    def _jit(f):
        return numba.njit(cache=True)(f)
else:
    def _jit(f):
        return f

# counter rows
ROW_Z, ROW_BETA, ROW_GIBBS, ROW_M1, ROW_M2, ROW_M3, ROW_EJECT, ROW_ABSORB = range(8)


@_jit
def log1pexp(x):
    """log(1 + exp(x)) without overflow."""
    if x > 0.0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


_LANCZOS_G = 7.0
_LANCZOS = (0.99999999999980993, 676.5203681218851, -1259.1392167224028,
            771.32342877765313, -176.61502916214059, 12.507343278686905,
            -0.13857109526572012, 9.9843695780195716e-6,
            1.5056327351493116e-7)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


@_jit
def lgamma(x):
    """Lanczos log-gamma for x > 0.

    CPython's math.lgamma and libm's (used by the JIT) disagree by ULPs,
    which would break bit-reproducibility across the two kernel paths;
    this shared implementation uses only exp/log arithmetic, which both
    paths evaluate identically.
    """
    if x < 0.5:
        # shift into the Lanczos domain: lgamma(x) = lgamma(x+2) - log(x(x+1))
        return lgamma(x + 2.0) - math.log(x) - math.log(x + 1.0)
    z = x - 1.0
    acc = _LANCZOS[0]
    for i in range(1, 9):
        acc += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


@_jit
def dist_rows(Z, i, out):
    """Distances from actor i to all actors, written into out (n,)."""
    n, d = Z.shape
    for j in range(n):
        acc = 0.0
        for c in range(d):
            t = Z[i, c] - Z[j, c]
            acc += t * t
        out[j] = math.sqrt(acc)


@_jit
def dist_matrix(Z):
    n = Z.shape[0]
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            acc = 0.0
            for c in range(Z.shape[1]):
                t = Z[i, c] - Z[j, c]
                acc += t * t
            r = math.sqrt(acc)
            D[i, j] = r
            D[j, i] = r
    return D


@_jit
def loglik_full(D, Y, beta, directed):
    """Log-likelihood over dyads: i<j once (undirected) or both directions."""
    n = D.shape[0]
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            eta = beta - D[i, j]
            lse = log1pexp(eta)
            if directed:
                total += (Y[i, j] + Y[j, i]) * eta - 2.0 * lse
            else:
                total += Y[i, j] * eta - lse
    return total


@_jit
def loglik_delta_actor(D, Y, beta, directed, i, dnew):
    """Change in log-likelihood when actor i's distances D[i,:] become dnew."""
    n = D.shape[0]
    delta = 0.0
    for j in range(n):
        if j == i:
            continue
        eta_old = beta - D[i, j]
        eta_new = beta - dnew[j]
        if directed:
            ysum = Y[i, j] + Y[j, i]
            delta += ysum * (eta_new - eta_old)
            delta -= 2.0 * (log1pexp(eta_new) - log1pexp(eta_old))
        else:
            delta += Y[i, j] * (eta_new - eta_old)
            delta -= log1pexp(eta_new) - log1pexp(eta_old)
    return delta


@_jit
def cluster_term(ng, s2, q, d, alpha, delta, omega2):
    """Collapsed per-cluster term from (n_g, ||s_g||^2, q_g)."""
    t = ng + 1.0 / omega2
    arg = delta + q - s2 / t
    half = (ng * d + alpha) / 2.0
    return lgamma(half) - (d / 2.0) * math.log(t) - half * math.log(arg)


@_jit
def cluster_scale_arg(ng, s2, q, delta, omega2):
    """Scale argument of the cluster term; must stay positive."""
    return delta + q - s2 / (ng + 1.0 / omega2)


@_jit
def sqnorm(v):
    acc = 0.0
    for c in range(v.shape[0]):
        acc += v[c] * v[c]
    return acc


@_jit
def kg_terms(counts, G, n, d, alpha, delta, nu, omega2):
    """Allocation-vector and component-count terms of the collapsed posterior."""
    v = lgamma(G * nu) - G * lgamma(nu)
    v += (G * alpha / 2.0) * math.log(delta) - G * lgamma(alpha / 2.0)
    v -= (G * d / 2.0) * math.log(omega2)
    for g in range(G):
        v += lgamma(counts[g] + nu)
    v -= lgamma(n + G * nu)
    v += -1.0 - lgamma(G + 1.0)
    return v


@_jit
def log_posterior_from_state(D, Y, beta, directed, K, counts, S, Q, G,
                             d, alpha, delta, nu, omega2, xi, psi):
    n = D.shape[0]
    v = loglik_full(D, Y, beta, directed)
    for g in range(G):
        v += cluster_term(counts[g], sqnorm(S[g]), Q[g], d, alpha, delta, omega2)
    v += kg_terms(counts, G, n, d, alpha, delta, nu, omega2)
    v += -0.5 * math.log(2.0 * math.pi * psi) - (beta - xi) ** 2 / (2.0 * psi)
    v += -(d * n / 2.0) * math.log(math.pi)
    return v


@_jit
def recompute_stats(Z, K, counts, S, Q):
    n, d = Z.shape
    counts[:] = 0
    S[:, :] = 0.0
    Q[:] = 0.0
    for i in range(n):
        g = K[i]
        counts[g] += 1
        for c in range(d):
            S[g, c] += Z[i, c]
        Q[g] += sqnorm(Z[i])


@_jit
def pe_eject(G, gmax):
    """Probability of attempting an ejection rather than an absorption."""
    if G == 1:
        return 1.0
    if G >= gmax:
        return 0.0
    return 0.5


@_jit
def update_positions(Z, D, Y, K, counts, S, Q, beta, directed,
                     d, alpha, delta, omega2, sigma_z2, rng, counters):
    """One Metropolis pass over all actors, ascending index order."""
    n = Z.shape[0]
    sd = math.sqrt(sigma_z2)
    znew = np.empty(d)
    dnew = np.empty(n)
    for i in range(n):
        for c in range(d):
            znew[c] = Z[i, c] + sd * rng.standard_normal()
        u = rng.random()
        counters[ROW_Z, 0] += 1
        g = K[i]
        # distances under the proposal
        acc_lik = 0.0
        for j in range(n):
            accd = 0.0
            for c in range(d):
                t = znew[c] - Z[j, c]
                accd += t * t
            dnew[j] = math.sqrt(accd)
        acc_lik = loglik_delta_actor(D, Y, beta, directed, i, dnew)
        # cluster term of i's own cluster
        s2_old = sqnorm(S[g])
        q_old = Q[g]
        s2_new = 0.0
        qz_old = sqnorm(Z[i])
        qz_new = sqnorm(znew)
        for c in range(d):
            t = S[g, c] - Z[i, c] + znew[c]
            s2_new += t * t
        q_new = q_old - qz_old + qz_new
        dlt = acc_lik
        dlt += cluster_term(counts[g], s2_new, q_new, d, alpha, delta, omega2)
        dlt -= cluster_term(counts[g], s2_old, q_old, d, alpha, delta, omega2)
        if math.log(u) < dlt:
            counters[ROW_Z, 1] += 1
            for c in range(d):
                S[g, c] += znew[c] - Z[i, c]
                Z[i, c] = znew[c]
            Q[g] = q_new
            for j in range(n):
                D[i, j] = dnew[j]
                D[j, i] = dnew[j]
            D[i, i] = 0.0


@_jit
def update_intercept(D, Y, beta, directed, xi, psi, sigma_beta2, rng, counters):
    """Metropolis update of the intercept; returns the new value."""
    prop = beta + math.sqrt(sigma_beta2) * rng.standard_normal()
    u = rng.random()
    counters[ROW_BETA, 0] += 1
    dlt = loglik_full(D, Y, prop, directed) - loglik_full(D, Y, beta, directed)
    dlt += -(prop - xi) ** 2 / (2.0 * psi) + (beta - xi) ** 2 / (2.0 * psi)
    if math.log(u) < dlt:
        counters[ROW_BETA, 1] += 1
        return prop
    return beta


@_jit
def gibbs_allocations(Z, K, counts, S, Q, G,
                      d, alpha, delta, nu, omega2, rng, counters):
    """Full Gibbs pass over allocations, ascending actor order."""
    n = Z.shape[0]
    logw = np.empty(G)
    for i in range(n):
        counters[ROW_GIBBS, 0] += 1
        counters[ROW_GIBBS, 1] += 1
        g0 = K[i]
        qz = sqnorm(Z[i])
        # remove actor i
        counts[g0] -= 1
        for c in range(d):
            S[g0, c] -= Z[i, c]
        Q[g0] -= qz
        for g in range(G):
            s2_without = sqnorm(S[g])
            s2_with = 0.0
            for c in range(d):
                t = S[g, c] + Z[i, c]
                s2_with += t * t
            logw[g] = (cluster_term(counts[g] + 1, s2_with, Q[g] + qz,
                                    d, alpha, delta, omega2)
                       - cluster_term(counts[g], s2_without, Q[g],
                                      d, alpha, delta, omega2)
                       + lgamma(counts[g] + 1 + nu)
                       - lgamma(counts[g] + nu))
        mx = logw[0]
        for g in range(1, G):
            if logw[g] > mx:
                mx = logw[g]
        tot = 0.0
        for g in range(G):
            logw[g] = math.exp(logw[g] - mx)
            tot += logw[g]
        u = rng.random() * tot
        gnew = G - 1
        acc = 0.0
        for g in range(G):
            acc += logw[g]
            if u < acc:
                gnew = g
                break
        K[i] = gnew
        counts[gnew] += 1
        for c in range(d):
            S[gnew, c] += Z[i, c]
        Q[gnew] += qz


@_jit
def _pair_distinct(G, rng):
    j1 = rng.integers(0, G)
    j2 = rng.integers(0, G - 1)
    if j2 >= j1:
        j2 += 1
    return j1, j2


@_jit
def _two_group_delta(Z, K, members, nm, j1, j2, counts, S, Q,
                     d, alpha, delta, nu, omega2,
                     c1_new, s1_new, q1_new, c2_new, s2_new, q2_new):
    """Posterior change when groups j1, j2 get the given new stats."""
    dlt = cluster_term(c1_new, sqnorm(s1_new), q1_new, d, alpha, delta, omega2)
    dlt += cluster_term(c2_new, sqnorm(s2_new), q2_new, d, alpha, delta, omega2)
    dlt -= cluster_term(counts[j1], sqnorm(S[j1]), Q[j1], d, alpha, delta, omega2)
    dlt -= cluster_term(counts[j2], sqnorm(S[j2]), Q[j2], d, alpha, delta, omega2)
    dlt += lgamma(c1_new + nu) + lgamma(c2_new + nu)
    dlt -= lgamma(counts[j1] + nu) + lgamma(counts[j2] + nu)
    return dlt


@_jit
def move1(Z, K, counts, S, Q, G, d, alpha, delta, nu, omega2, rng, counters):
    """Beta(1,1) reallocation of two groups' members.

    The acceptance ratio carries the marginal proposal correction
    Gamma(a0+1)Gamma(b0+1)/(Gamma(a1+1)Gamma(b1+1)); without it the move
    fails detailed balance for nu != 1.
    """
    if G < 2:
        return
    n = Z.shape[0]
    j1, j2 = _pair_distinct(G, rng)
    p = rng.random()
    counters[ROW_M1, 0] += 1
    a0 = counts[j1]
    b0 = counts[j2]
    nm = a0 + b0
    newk = np.empty(n, np.int64)
    c1 = 0
    s1 = np.zeros(d)
    q1 = 0.0
    c2 = 0
    s2 = np.zeros(d)
    q2 = 0.0
    a1 = 0
    for i in range(n):
        if K[i] == j1 or K[i] == j2:
            if rng.random() < p:
                newk[i] = j1
                a1 += 1
                c1 += 1
                for c in range(d):
                    s1[c] += Z[i, c]
                q1 += sqnorm(Z[i])
            else:
                newk[i] = j2
                c2 += 1
                for c in range(d):
                    s2[c] += Z[i, c]
                q2 += sqnorm(Z[i])
        else:
            newk[i] = -1
    b1 = nm - a1
    dlt = _two_group_delta(Z, K, newk, nm, j1, j2, counts, S, Q,
                           d, alpha, delta, nu, omega2, c1, s1, q1, c2, s2, q2)
    dlt += (lgamma(a0 + 1.0) + lgamma(b0 + 1.0)
            - lgamma(a1 + 1.0) - lgamma(b1 + 1.0))
    u = rng.random()
    if math.log(u) < dlt:
        counters[ROW_M1, 1] += 1
        for i in range(n):
            if newk[i] >= 0:
                K[i] = newk[i]
        counts[j1] = c1
        counts[j2] = c2
        for c in range(d):
            S[j1, c] = s1[c]
            S[j2, c] = s2[c]
        Q[j1] = q1
        Q[j2] = q2


@_jit
def move2(Z, K, counts, S, Q, G, d, alpha, delta, nu, omega2, rng, counters):
    """Move a uniform subset of one group to another."""
    if G < 2:
        return
    n = Z.shape[0]
    j1, j2 = _pair_distinct(G, rng)
    counters[ROW_M2, 0] += 1
    n1 = counts[j1]
    n2 = counts[j2]
    if n1 == 0:
        return
    m = 1 + rng.integers(0, n1)
    members = np.empty(n1, np.int64)
    t = 0
    for i in range(n):
        if K[i] == j1:
            members[t] = i
            t += 1
    # partial Fisher-Yates: members[:m] is a uniform m-subset
    for t in range(m):
        r = t + rng.integers(0, n1 - t)
        tmp = members[t]
        members[t] = members[r]
        members[r] = tmp
    smov = np.zeros(d)
    qmov = 0.0
    for t in range(m):
        i = members[t]
        for c in range(d):
            smov[c] += Z[i, c]
        qmov += sqnorm(Z[i])
    s1 = np.zeros(d)
    s2 = np.zeros(d)
    for c in range(d):
        s1[c] = S[j1, c] - smov[c]
        s2[c] = S[j2, c] + smov[c]
    dlt = _two_group_delta(Z, K, members, 0, j1, j2, counts, S, Q,
                           d, alpha, delta, nu, omega2,
                           n1 - m, s1, Q[j1] - qmov, n2 + m, s2, Q[j2] + qmov)
    # proposal ratio n_{j1}/(n_{j2}+m) * n_{j1}! n_{j2}! / ((n_{j1}-m)! (n_{j2}+m)!)
    dlt += math.log(n1) - math.log(n2 + m)
    dlt += (lgamma(n1 + 1.0) + lgamma(n2 + 1.0)
            - lgamma(n1 - m + 1.0) - lgamma(n2 + m + 1.0))
    u = rng.random()
    if math.log(u) < dlt:
        counters[ROW_M2, 1] += 1
        for t in range(m):
            K[members[t]] = j2
        counts[j1] = n1 - m
        counts[j2] = n2 + m
        for c in range(d):
            S[j1, c] = s1[c]
            S[j2, c] = s2[c]
        Q[j1] -= qmov
        Q[j2] += qmov


@_jit
def move3(Z, K, counts, S, Q, G, d, alpha, delta, nu, omega2, rng, counters):
    """Sequential predictive reallocation of two groups' members.

    Forward proposal probabilities condition on the new allocations of
    previously visited members; the reverse probabilities condition on the
    old ones.  Both tracks are built incrementally from empty shells.

    Substituting the reverse-track product into the ratio cancels the
    target terms, leaving only the per-step normaliser ratio, so this move
    accepts nearly always: it mostly performs posterior-equivalent label
    rearrangements of the two groups.  Approximating the reverse product
    with forward-track probabilities would reject those rearrangements
    but breaks the invariance the balance suite enforces.
    """
    if G < 2:
        return
    n = Z.shape[0]
    j1, j2 = _pair_distinct(G, rng)
    counters[ROW_M3, 0] += 1
    nm = counts[j1] + counts[j2]
    if nm == 0:
        return
    members = np.empty(nm, np.int64)
    t = 0
    for i in range(n):
        if K[i] == j1 or K[i] == j2:
            members[t] = i
            t += 1
    # uniformly random visiting order
    for t in range(nm - 1, 0, -1):
        r = rng.integers(0, t + 1)
        tmp = members[t]
        members[t] = members[r]
        members[r] = tmp
    fc = np.zeros(2, np.int64)
    fs = np.zeros((2, d))
    fq = np.zeros(2)
    rc = np.zeros(2, np.int64)
    rs = np.zeros((2, d))
    rq = np.zeros(2)
    newk = np.empty(n, np.int64)
    for i in range(n):
        newk[i] = -1
    logq_fwd = 0.0
    logq_rev = 0.0
    w = np.empty(2)
    for t in range(nm):
        i = members[t]
        qz = sqnorm(Z[i])
        for h in range(2):
            s2_with = 0.0
            for c in range(d):
                v = fs[h, c] + Z[i, c]
                s2_with += v * v
            w[h] = (cluster_term(fc[h] + 1, s2_with, fq[h] + qz,
                                 d, alpha, delta, omega2)
                    - cluster_term(fc[h], sqnorm(fs[h]), fq[h],
                                   d, alpha, delta, omega2)
                    + lgamma(fc[h] + 1 + nu) - lgamma(fc[h] + nu))
        mx = w[0] if w[0] > w[1] else w[1]
        p0 = math.exp(w[0] - mx)
        p1 = math.exp(w[1] - mx)
        tot = p0 + p1
        u = rng.random() * tot
        h = 0 if u < p0 else 1
        logq_fwd += math.log((p0 if h == 0 else p1) / tot)
        # reverse track: probability of re-proposing the current allocation
        for hh in range(2):
            s2_with = 0.0
            for c in range(d):
                v = rs[hh, c] + Z[i, c]
                s2_with += v * v
            w[hh] = (cluster_term(rc[hh] + 1, s2_with, rq[hh] + qz,
                                  d, alpha, delta, omega2)
                     - cluster_term(rc[hh], sqnorm(rs[hh]), rq[hh],
                                    d, alpha, delta, omega2)
                     + lgamma(rc[hh] + 1 + nu) - lgamma(rc[hh] + nu))
        mxr = w[0] if w[0] > w[1] else w[1]
        r0 = math.exp(w[0] - mxr)
        r1 = math.exp(w[1] - mxr)
        hold = 0 if K[i] == j1 else 1
        logq_rev += math.log((r0 if hold == 0 else r1) / (r0 + r1))
        newk[i] = j1 if h == 0 else j2
        fc[h] += 1
        for c in range(d):
            fs[h, c] += Z[i, c]
        fq[h] += qz
        rc[hold] += 1
        for c in range(d):
            rs[hold, c] += Z[i, c]
        rq[hold] += qz
    dlt = _two_group_delta(Z, K, members, nm, j1, j2, counts, S, Q,
                           d, alpha, delta, nu, omega2,
                           fc[0], fs[0], fq[0], fc[1], fs[1], fq[1])
    dlt += logq_rev - logq_fwd
    u = rng.random()
    if math.log(u) < dlt:
        counters[ROW_M3, 1] += 1
        for i in range(n):
            if newk[i] >= 0:
                K[i] = newk[i]
        counts[j1] = fc[0]
        counts[j2] = fc[1]
        for c in range(d):
            S[j1, c] = fs[0, c]
            S[j2, c] = fs[1, c]
        Q[j1] = fq[0]
        Q[j2] = fq[1]


@_jit
def eject_absorb(Z, K, counts, S, Q, G, gmax,
                 d, alpha, delta, nu, omega2, a_eject, rng, counters):
    """Trans-model pair: eject into a new top-labelled component, or merge
    the top-labelled component into another.

    The ejection q-ratio uses Gamma(a)^2/Gamma(2a) (the exact marginal of
    the Beta(a,a) split under these mechanics); absorbing the top label is
    the exact reversal, so the pair holds detailed balance on the labelled
    state space.  Returns the new G.
    """
    if gmax < 2:
        return G
    n = Z.shape[0]
    u = rng.random()
    pe = pe_eject(G, gmax)
    lnorm = 2.0 * lgamma(a_eject) - lgamma(2.0 * a_eject)
    if u < pe:
        # ---- eject from j1 into new component labelled G ----
        counters[ROW_EJECT, 0] += 1
        j1 = rng.integers(0, G)
        p = rng.beta(a_eject, a_eject)
        n_j1 = counts[j1]
        stay = np.empty(n, np.int64)
        n1p = 0
        n2p = 0
        s1 = np.zeros(d)
        q1 = 0.0
        s2 = np.zeros(d)
        q2 = 0.0
        for i in range(n):
            stay[i] = 1
            if K[i] == j1:
                if rng.random() < p:
                    n1p += 1
                    for c in range(d):
                        s1[c] += Z[i, c]
                    q1 += sqnorm(Z[i])
                else:
                    stay[i] = 0
                    n2p += 1
                    for c in range(d):
                        s2[c] += Z[i, c]
                    q2 += sqnorm(Z[i])
        dlt = (cluster_term(n1p, sqnorm(s1), q1, d, alpha, delta, omega2)
               + cluster_term(n2p, sqnorm(s2), q2, d, alpha, delta, omega2)
               - cluster_term(n_j1, sqnorm(S[j1]), Q[j1], d, alpha, delta, omega2))
        # allocation/prior terms that change with G -> G+1
        dlt += lgamma((G + 1) * nu) - lgamma(G * nu) - lgamma(nu)
        dlt += (alpha / 2.0) * math.log(delta) - lgamma(alpha / 2.0)
        dlt -= (d / 2.0) * math.log(omega2)
        dlt += (lgamma(n1p + nu) + lgamma(n2p + nu)
                - lgamma(n_j1 + nu))
        dlt -= lgamma(n + (G + 1) * nu) - lgamma(n + G * nu)
        dlt -= math.log(G + 1.0)  # Poisson(1) prior ratio
        # proposal ratio
        dlt += math.log(1.0 - pe_eject(G + 1, gmax)) - math.log(pe)
        dlt += lnorm + lgamma(2.0 * a_eject + n_j1)
        dlt -= lgamma(a_eject + n1p) + lgamma(a_eject + n2p)
        ua = rng.random()
        if math.log(ua) < dlt:
            counters[ROW_EJECT, 1] += 1
            for i in range(n):
                if K[i] == j1 and stay[i] == 0:
                    K[i] = G
            counts[j1] = n1p
            counts[G] = n2p
            for c in range(d):
                S[j1, c] = s1[c]
                S[G, c] = s2[c]
            Q[j1] = q1
            Q[G] = q2
            return G + 1
        return G
    # ---- absorb the top-labelled component into j1 ----
    counters[ROW_ABSORB, 0] += 1
    top = G - 1
    j1 = rng.integers(0, G - 1)
    n1 = counts[j1]
    n2 = counts[top]
    smerge = np.zeros(d)
    for c in range(d):
        smerge[c] = S[j1, c] + S[top, c]
    qmerge = Q[j1] + Q[top]
    # log acceptance ratio of the reverse ejection, then invert
    rev = (cluster_term(n1, sqnorm(S[j1]), Q[j1], d, alpha, delta, omega2)
           + cluster_term(n2, sqnorm(S[top]), Q[top], d, alpha, delta, omega2)
           - cluster_term(n1 + n2, sqnorm(smerge), qmerge, d, alpha, delta, omega2))
    rev += lgamma(G * nu) - lgamma((G - 1) * nu) - lgamma(nu)
    rev += (alpha / 2.0) * math.log(delta) - lgamma(alpha / 2.0)
    rev -= (d / 2.0) * math.log(omega2)
    rev += lgamma(n1 + nu) + lgamma(n2 + nu) - lgamma(n1 + n2 + nu)
    rev -= lgamma(n + G * nu) - lgamma(n + (G - 1) * nu)
    rev -= math.log(float(G))
    rev += math.log(1.0 - pe_eject(G, gmax)) - math.log(pe_eject(G - 1, gmax))
    rev += lnorm + lgamma(2.0 * a_eject + n1 + n2)
    rev -= lgamma(a_eject + n1) + lgamma(a_eject + n2)
    ua = rng.random()
    if math.log(ua) < -rev:
        counters[ROW_ABSORB, 1] += 1
        for i in range(n):
            if K[i] == top:
                K[i] = j1
        counts[j1] = n1 + n2
        counts[top] = 0
        for c in range(d):
            S[j1, c] += S[top, c]
            S[top, c] = 0.0
        Q[j1] += Q[top]
        Q[top] = 0.0
        return G - 1
    return G


@_jit
def compact_empty(Z, K, counts, S, Q, G):
    """Relabel-on-empty: move the highest occupied label into each gap so
    occupied labels are contiguous from 0 and empties sit on top.

    Pure relabelling: G is unchanged (component count changes only through
    ejection/absorption; the absorb move, which targets the top label, is
    what removes lingering empty components).  Relabelling maps a state to
    one of equal posterior value, so every label-invariant statistic is
    untouched.
    """
    n = Z.shape[0]
    lo = 0
    hi = G - 1
    while lo < hi:
        if counts[lo] != 0:
            lo += 1
        elif counts[hi] == 0:
            hi -= 1
        else:
            for i in range(n):
                if K[i] == hi:
                    K[i] = lo
            counts[lo] = counts[hi]
            for c in range(S.shape[1]):
                S[lo, c] = S[hi, c]
                S[hi, c] = 0.0
            Q[lo] = Q[hi]
            counts[hi] = 0
            Q[hi] = 0.0
            lo += 1
            hi -= 1
    return G


@_jit
def sweep(Z, D, Y, K, counts, S, Q, beta, G, directed, gmax,
          d, alpha, delta, nu, omega2, xi, psi,
          sigma_z2, sigma_beta2, a_eject, compact, rng, counters):
    """One full sweep in the fixed move order; returns (beta, G)."""
    update_positions(Z, D, Y, K, counts, S, Q, beta, directed,
                     d, alpha, delta, omega2, sigma_z2, rng, counters)
    beta = update_intercept(D, Y, beta, directed, xi, psi, sigma_beta2,
                            rng, counters)
    gibbs_allocations(Z, K, counts, S, Q, G, d, alpha, delta, nu, omega2,
                      rng, counters)
    move1(Z, K, counts, S, Q, G, d, alpha, delta, nu, omega2, rng, counters)
    move2(Z, K, counts, S, Q, G, d, alpha, delta, nu, omega2, rng, counters)
    move3(Z, K, counts, S, Q, G, d, alpha, delta, nu, omega2, rng, counters)
    G = eject_absorb(Z, K, counts, S, Q, G, gmax,
                     d, alpha, delta, nu, omega2, a_eject, rng, counters)
    if compact:
        G = compact_empty(Z, K, counts, S, Q, G)
    recompute_stats(Z, K, counts, S, Q)
    return beta, G


@_jit
def run_sweeps(Z, D, Y, K, counts, S, Q, beta, G, directed, gmax,
               d, alpha, delta, nu, omega2, xi, psi,
               sigma_z2, sigma_beta2, a_eject, compact,
               iterations, burnin, thin, rng, counters,
               rec_iter, rec_G, rec_beta, rec_loglik, rec_logpost,
               rec_K, rec_Z):
    """Run the chain, recording every thin-th post-burnin sweep."""
    n = Z.shape[0]
    r = 0
    for t in range(1, iterations + 1):
        beta, G = sweep(Z, D, Y, K, counts, S, Q, beta, G, directed, gmax,
                        d, alpha, delta, nu, omega2, xi, psi,
                        sigma_z2, sigma_beta2, a_eject, compact, rng, counters)
        if t > burnin and (t - burnin) % thin == 0:
            rec_iter[r] = t
            rec_G[r] = G
            rec_beta[r] = beta
            rec_loglik[r] = loglik_full(D, Y, beta, directed)
            rec_logpost[r] = log_posterior_from_state(
                D, Y, beta, directed, K, counts, S, Q, G,
                d, alpha, delta, nu, omega2, xi, psi)
            for i in range(n):
                rec_K[r, i] = K[i]
                for c in range(d):
                    rec_Z[r, i, c] = Z[i, c]
            r += 1
    return beta, G, r
