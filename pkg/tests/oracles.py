"""Independent reference computations used by the tests.

Nothing here imports the numerical code under test; inputs come in as plain
arrays so that each oracle re-derives its value from first principles.
"""

import itertools
import math

import mpmath
import numpy as np


# ---------------------------------------------------------------------------
# hand-evaluated closed forms
# ---------------------------------------------------------------------------


def kernel_weight_at_zero(n, d, alpha_kernel=1.0):
    t = n ** (-1.0 / (d + 2 + alpha_kernel))
    return 1.0 / (n * t * (4 * math.pi * t) ** (d / 2))


def corollary_absolute(N, alpha, eps, A_h):
    return (math.pi * N / (alpha - eps) + A_h) * eps


def theorem_relative(M, gamma, eps, B_h):
    return math.pi * M * eps / (gamma - eps + gamma * eps) + 2 * B_h * eps / (2 - eps)


# ---------------------------------------------------------------------------
# partitions
# ---------------------------------------------------------------------------


def partition_is_valid(lam, groups, kind, threshold):
    """All-pairs check: elements of different groups are separated, and each
    group cannot be split into two mutually separated halves."""

    def sep(a, b):
        lo, hi = min(a, b), max(a, b)
        if kind == "alpha_difference":
            return hi - lo > threshold
        if lo == 0:
            return hi > 0
        return hi / lo - 1 > threshold

    for (a0, b0), (a1, b1) in itertools.combinations(groups, 2):
        for i in range(a0, b0):
            for j in range(a1, b1):
                if not sep(lam[i], lam[j]):
                    return False
    for a, b in groups:
        for cut in range(a + 1, b):
            if all(sep(lam[i], lam[j]) for i in range(a, cut) for j in range(cut, b)):
                return False
    return True


# ---------------------------------------------------------------------------
# least squares by QR
# ---------------------------------------------------------------------------


def qr_design_residual(lam, y, K, ridge=1e-8):
    """max |V h - y| for the ridge least-squares taps, after scaling h so that
    max over a fine grid of |hhat| on [0, 1.1 lam_max] is 1.

    The ridge problem is solved as the stacked system [V; sqrt(ridge) I] h = [y; 0].
    """
    V = np.exp(-np.outer(lam, np.arange(K)))
    A = np.vstack([V, np.sqrt(ridge) * np.eye(K)])
    Q, R = np.linalg.qr(A)
    h = np.linalg.solve(R, Q.T @ np.concatenate([y, np.zeros(K)]))
    grid = np.linspace(0, 1.1 * lam[-1], 200001)
    s = np.max(np.abs(np.exp(-np.outer(grid, np.arange(K))) @ h))
    return float(np.max(np.abs(V @ (h / s) - y)))


# ---------------------------------------------------------------------------
# matrix exponential by Taylor series with scaling and squaring
# ---------------------------------------------------------------------------


def expm_taylor(A, terms=30):
    norm = np.max(np.sum(np.abs(A), axis=1))
    s = max(0, int(math.ceil(math.log2(max(norm, 1e-300)))) + 1)
    B = A / 2**s
    E = np.eye(A.shape[0])
    term = np.eye(A.shape[0])
    for k in range(1, terms):
        term = term @ B / k
        E = E + term
    for _ in range(s):
        E = E @ E
    return E


# ---------------------------------------------------------------------------
# high-precision network loss
# ---------------------------------------------------------------------------


def _mp_array(a):
    return np.vectorize(mpmath.mpf, otypes=[object])(np.asarray(a, dtype=np.float64))


def _mp_act(name, z):
    if name == "relu":
        return np.vectorize(lambda v: v if v > 0 else mpmath.mpf(0), otypes=[object])(z)
    if name == "abs":
        return np.vectorize(abs, otypes=[object])(z)
    return np.vectorize(mpmath.tanh, otypes=[object])(z)


class MpNetwork:
    """Mean binary cross-entropy of a graph network, evaluated in mpmath.

    ``samples`` is a list of (eigenvalues, eigenvectors, X, label).  The
    network maps X through layers x_p <- act(sum_q Phi diag(sum_k h_pqk
    exp(-k lam)) Phi^T x_q), averages the last layer over nodes, and applies
    a linear readout.
    """

    def __init__(self, samples, nonlinearity, dps=40):
        mpmath.mp.dps = dps
        self.nonlinearity = nonlinearity
        self.samples = []
        for lam, phi, X, label in samples:
            self.samples.append((_mp_array(lam), _mp_array(phi), _mp_array(np.atleast_2d(X.T).T), int(label)))

    def loss(self, taps, w, b):
        total = mpmath.mpf(0)
        for lam, phi, X, y in self.samples:
            n = lam.shape[0]
            x = X
            for t in taps:
                fo, fi, K = t.shape
                E = np.array([[mpmath.exp(-k * lam[i]) for k in range(K)] for i in range(n)], dtype=object)
                xhat = phi.T.dot(x)
                zhat = np.empty((n, fo), dtype=object)
                for p in range(fo):
                    acc = np.array([mpmath.mpf(0)] * n, dtype=object)
                    for q in range(fi):
                        acc = acc + E.dot(t[p, q]) * xhat[:, q]
                    zhat[:, p] = acc
                x = _mp_act(self.nonlinearity, phi.dot(zhat))
            pooled = x.sum(axis=0) / n
            z = w.dot(pooled) + b
            total += mpmath.log(1 + mpmath.exp(z)) - y * z
        return total / len(self.samples)

    def central_difference(self, taps, w, b, step=1e-5):
        """Central differences for every parameter, in the order taps..., w, b."""
        taps = [_mp_array(t) for t in taps]
        w = _mp_array(w)
        b = mpmath.mpf(float(b))
        h = mpmath.mpf(step)
        out = []
        for li, t in enumerate(taps):
            g = np.empty(t.shape)
            for idx in np.ndindex(t.shape):
                vals = []
                for s in (1, -1):
                    tt = [a.copy() for a in taps]
                    tt[li][idx] += s * h
                    vals.append(self.loss(tt, w, b))
                g[idx] = float((vals[0] - vals[1]) / (2 * h))
            out.append(g)
        gw = np.empty(w.shape)
        for i in range(w.size):
            vals = []
            for s in (1, -1):
                ww = w.copy()
                ww[i] += s * h
                vals.append(self.loss(taps, ww, b))
            gw[i] = float((vals[0] - vals[1]) / (2 * h))
        out.append(gw)
        out.append(np.array([float((self.loss(taps, w, b + h) - self.loss(taps, w, b - h)) / (2 * h))]))
        return out


def max_relative_gap(analytic, reference, floor=0.0):
    """max |a - r| / max(|a|, |r|, floor) over all parameters (0 when both vanish)."""
    worst = 0.0
    for a, r in zip(analytic, reference):
        a = np.ravel(a)
        r = np.ravel(r)
        scale = np.maximum(np.maximum(np.abs(a), np.abs(r)), floor)
        mask = scale > 0
        if np.any(mask):
            worst = max(worst, float(np.max(np.abs(a - r)[mask] / scale[mask])))
    return worst
