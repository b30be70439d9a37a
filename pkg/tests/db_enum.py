"""Exact transition matrices for the allocation moves on a tiny state space.

These enumerators mirror the kernel mechanics one-to-one (selection
probabilities, proposal laws, acceptance ratios) so that invariance of the
enumerated posterior can be checked to floating-point accuracy, and so the
kernels themselves can be cross-checked empirically against the matrices.
"""

import itertools
import math
from math import lgamma, log

import numpy as np


class ToySpace:
    """All (K, G) states for n actors, frozen 1-d positions, G <= gmax."""

    def __init__(self, Z, gmax, hp):
        self.Z = np.asarray(Z, dtype=float).reshape(-1)
        self.n = self.Z.size
        self.gmax = gmax
        self.hp = hp
        self.states = [(K, G) for G in range(1, gmax + 1)
                       for K in itertools.product(range(G), repeat=self.n)]
        self.index = {s: i for i, s in enumerate(self.states)}
        logpi = np.array([self.log_pi(K, G) for K, G in self.states])
        p = np.exp(logpi - logpi.max())
        self.pi = p / p.sum()
        self.logpi = logpi

    def cluster_term(self, members):
        hp = self.hp
        ng = len(members)
        s = sum(self.Z[i] for i in members)
        q = sum(self.Z[i] ** 2 for i in members)
        t = ng + 1.0 / hp.omega2
        half = (ng * hp.d + hp.alpha) / 2.0
        return lgamma(half) - (hp.d / 2.0) * log(t) \
            - half * log(hp.delta + q - s * s / t)

    def log_pi(self, K, G):
        hp = self.hp
        v = 0.0
        for g in range(G):
            mem = [i for i in range(self.n) if K[i] == g]
            v += self.cluster_term(mem) + lgamma(len(mem) + hp.nu)
        v += lgamma(G * hp.nu) - G * lgamma(hp.nu)
        v += (G * hp.alpha / 2.0) * log(hp.delta) - G * lgamma(hp.alpha / 2.0)
        v -= (G * hp.d / 2.0) * log(hp.omega2)
        v -= lgamma(self.n + G * hp.nu)
        v += -1.0 - lgamma(G + 1.0)
        return v

    def pe(self, G):
        if self.gmax == 1:
            return 0.0
        if G == 1:
            return 1.0
        if G >= self.gmax:
            return 0.0
        return 0.5

    def members(self, K, g):
        return [i for i in range(self.n) if K[i] == g]

    # ------------------------------------------------------------ kernels

    def gibbs_matrix(self):
        """Sequential full pass: product of single-site kernels."""
        S = len(self.states)
        P = np.eye(S)
        for site in range(self.n):
            Ps = np.zeros((S, S))
            for (K, G), si in self.index.items():
                logw = []
                for g in range(G):
                    mem = [j for j in self.members(K, g) if j != site]
                    c = len(mem)
                    logw.append(self.cluster_term(mem + [site])
                                - self.cluster_term(mem)
                                + lgamma(c + 1 + self.hp.nu)
                                - lgamma(c + self.hp.nu))
                mx = max(logw)
                w = np.exp(np.array(logw) - mx)
                w /= w.sum()
                for g in range(G):
                    Knew = list(K)
                    Knew[site] = g
                    Ps[si, self.index[(tuple(Knew), G)]] += w[g]
            P = P @ Ps
        return P

    def move1_matrix(self):
        S = len(self.states)
        P = np.zeros((S, S))
        for (K, G), si in self.index.items():
            if G < 2:
                P[si, si] = 1.0
                continue
            npairs = G * (G - 1)
            for j1 in range(G):
                for j2 in range(G):
                    if j1 == j2:
                        continue
                    M = [i for i in range(self.n) if K[i] in (j1, j2)]
                    a0 = sum(1 for i in M if K[i] == j1)
                    b0 = len(M) - a0
                    if not M:
                        P[si, si] += 1.0 / npairs
                        continue
                    for bits in itertools.product([0, 1], repeat=len(M)):
                        a1 = bits.count(0)
                        b1 = len(M) - a1
                        q = math.exp(lgamma(a1 + 1) + lgamma(b1 + 1)
                                     - lgamma(len(M) + 2))
                        Knew = list(K)
                        for i, b in zip(M, bits):
                            Knew[i] = j1 if b == 0 else j2
                        sj = self.index[(tuple(Knew), G)]
                        dlt = self.logpi[sj] - self.logpi[si]
                        dlt += (lgamma(a0 + 1) + lgamma(b0 + 1)
                                - lgamma(a1 + 1) - lgamma(b1 + 1))
                        A = min(1.0, math.exp(dlt))
                        P[si, sj] += q * A / npairs
                        P[si, si] += q * (1 - A) / npairs
        return P

    def move2_matrix(self):
        S = len(self.states)
        P = np.zeros((S, S))
        for (K, G), si in self.index.items():
            if G < 2:
                P[si, si] = 1.0
                continue
            npairs = G * (G - 1)
            for j1 in range(G):
                for j2 in range(G):
                    if j1 == j2:
                        continue
                    mem1 = self.members(K, j1)
                    n1 = len(mem1)
                    n2 = len(self.members(K, j2))
                    if n1 == 0:
                        P[si, si] += 1.0 / npairs
                        continue
                    for m in range(1, n1 + 1):
                        for sub in itertools.combinations(mem1, m):
                            Knew = list(K)
                            for i in sub:
                                Knew[i] = j2
                            sj = self.index[(tuple(Knew), G)]
                            lq = (log(n1) - log(n2 + m)
                                  + lgamma(n1 + 1) + lgamma(n2 + 1)
                                  - lgamma(n1 - m + 1) - lgamma(n2 + m + 1))
                            A = min(1.0, math.exp(self.logpi[sj]
                                                  - self.logpi[si] + lq))
                            w = 1.0 / (n1 * math.comb(n1, m))
                            P[si, sj] += w * A / npairs
                            P[si, si] += w * (1 - A) / npairs
        return P

    def _seq_weight(self, shell, i):
        c, mem = shell
        return (self.cluster_term(mem + [i]) - self.cluster_term(mem)
                + lgamma(c + 1 + self.hp.nu) - lgamma(c + self.hp.nu))

    def move3_matrix(self):
        S = len(self.states)
        P = np.zeros((S, S))
        for (K, G), si in self.index.items():
            if G < 2:
                P[si, si] = 1.0
                continue
            npairs = G * (G - 1)
            for j1 in range(G):
                for j2 in range(G):
                    if j1 == j2:
                        continue
                    M = [i for i in range(self.n) if K[i] in (j1, j2)]
                    if not M:
                        P[si, si] += 1.0 / npairs
                        continue
                    for order in itertools.permutations(M):
                        po = 1.0 / math.factorial(len(M))
                        for bits in itertools.product([0, 1], repeat=len(M)):
                            fwd = {j1: [], j2: []}
                            rev = {j1: [], j2: []}
                            lqf = 0.0
                            lqr = 0.0
                            for i, b in zip(order, bits):
                                tgt = j1 if b == 0 else j2
                                wts = {j: self._seq_weight(
                                    (len(fwd[j]), fwd[j]), i) for j in (j1, j2)}
                                mx = max(wts.values())
                                tot = sum(math.exp(v - mx) for v in wts.values())
                                lqf += wts[tgt] - mx - log(tot)
                                wtsr = {j: self._seq_weight(
                                    (len(rev[j]), rev[j]), i) for j in (j1, j2)}
                                mxr = max(wtsr.values())
                                totr = sum(math.exp(v - mxr)
                                           for v in wtsr.values())
                                lqr += wtsr[K[i]] - mxr - log(totr)
                                fwd[tgt].append(i)
                                rev[K[i]].append(i)
                            Knew = list(K)
                            for i, b in zip(order, bits):
                                Knew[i] = j1 if b == 0 else j2
                            sj = self.index[(tuple(Knew), G)]
                            A = min(1.0, math.exp(self.logpi[sj]
                                                  - self.logpi[si] + lqr - lqf))
                            P[si, sj] += po * math.exp(lqf) * A / npairs
                            P[si, si] += po * math.exp(lqf) * (1 - A) / npairs
        return P

    def eject_absorb_matrix(self):
        hp = self.hp
        a = hp.a_eject
        lnorm = 2 * lgamma(a) - lgamma(2 * a)
        S = len(self.states)
        P = np.zeros((S, S))
        for (K, G), si in self.index.items():
            peG = self.pe(G)
            if self.gmax == 1:
                P[si, si] = 1.0
                continue
            if peG > 0:
                for j1 in range(G):
                    mem = self.members(K, j1)
                    nj1 = len(mem)
                    for bits in itertools.product([0, 1], repeat=nj1):
                        n1p = bits.count(0)
                        n2p = nj1 - n1p
                        w = math.exp(lgamma(a + n1p) + lgamma(a + n2p)
                                     - lgamma(2 * a + nj1) - lnorm)
                        Knew = list(K)
                        for i, b in zip(mem, bits):
                            if b == 1:
                                Knew[i] = G
                        sj = self.index[(tuple(Knew), G + 1)]
                        lq = (log(1 - self.pe(G + 1)) - log(peG) + lnorm
                              + lgamma(2 * a + nj1)
                              - lgamma(a + n1p) - lgamma(a + n2p))
                        A = min(1.0, math.exp(self.logpi[sj]
                                              - self.logpi[si] + lq))
                        P[si, sj] += peG / G * w * A
                        P[si, si] += peG / G * w * (1 - A)
            pa = 1 - peG
            if pa > 0 and G >= 2:
                top = G - 1
                for j1 in range(G - 1):
                    Knew = [j1 if k == top else k for k in K]
                    sj = self.index[(tuple(Knew), G - 1)]
                    n1 = len(self.members(K, j1))
                    n2 = len(self.members(K, top))
                    rev = (self.logpi[si] - self.logpi[sj]
                           + log(1 - self.pe(G)) - log(self.pe(G - 1)) + lnorm
                           + lgamma(2 * a + n1 + n2)
                           - lgamma(a + n1) - lgamma(a + n2))
                    A = min(1.0, math.exp(-rev))
                    P[si, sj] += pa / (G - 1) * A
                    P[si, si] += pa / (G - 1) * (1 - A)
        return P
