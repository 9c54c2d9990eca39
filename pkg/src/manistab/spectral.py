"""Eigendecomposition, frequency-domain projection, spectrum partitions and Weyl-law gap indices."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.linalg

from .errors import ConfigurationError, ContractError, DataError, DomainError, InvariantError
from .geometry import SignalVector
from .graph import DenseOperator

THRESHOLD_KINDS = ("alpha_difference", "gamma_ratio")
ZERO_TOL = 1e-9


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        lam = np.array(self.eigenvalues, dtype=np.float64, copy=True)
        phi = np.array(self.eigenvectors, dtype=np.float64, copy=True)
        if lam.ndim != 1 or phi.shape != (lam.size, lam.size):
            raise DataError("eigenvectors must be an n x n matrix matching n eigenvalues")
        if np.any(np.diff(lam) < 0):
            raise DataError("eigenvalues must be ascending")
        lam.setflags(write=False)
        phi.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "eigenvectors", phi)

    @property
    def n(self) -> int:
        return self.eigenvalues.size


def _fix_signs(phi):
    # largest-magnitude entry of every column made nonnegative; argmax takes the lowest index on ties
    idx = np.argmax(np.abs(phi), axis=0)
    signs = np.where(phi[idx, np.arange(phi.shape[1])] < 0, -1.0, 1.0)
    return phi * signs


def eigendecompose(op: DenseOperator) -> SpectralDecomposition:
    """Full symmetric eigendecomposition with a deterministic sign convention."""
    m = op.matrix
    if not np.all(np.isfinite(m)):
        raise DataError("operator has non-finite entries")
    lam, phi = scipy.linalg.eigh(m)
    phi = _fix_signs(phi)
    scale = max(1.0, float(np.max(np.abs(lam))))
    if op.kind == "laplacian" and lam[0] < -1e-9 * scale:
        raise InvariantError(f"laplacian has negative eigenvalue {lam[0]:.3e}")
    return SpectralDecomposition(lam, phi)


def check_decomposition(op: DenseOperator, dec: SpectralDecomposition) -> Tuple[float, float]:
    """Return (orthonormality error, residual ||L Phi - Phi Lambda||_max)."""
    phi = dec.eigenvectors
    orth = float(np.max(np.abs(phi.T @ phi - np.eye(dec.n))))
    resid = float(np.max(np.abs(op.matrix @ phi - phi * dec.eigenvalues)))
    return orth, resid


def _as_matrix(x, n):
    v = x.values if isinstance(x, SignalVector) else np.asarray(x, dtype=np.float64)
    squeeze = v.ndim == 1
    if squeeze:
        v = v[:, None]
    if v.shape[0] != n:
        raise ContractError(f"signal has {v.shape[0]} entries, decomposition has {n}")
    return v, squeeze


def project(dec: SpectralDecomposition, x) -> np.ndarray:
    """Frequency coefficients under the L2(G_n) inner product (1/n) sum u_i v_i.

    The basis is psi_i = sqrt(n) phi_i, orthonormal in L2(G_n), so
    x_hat = Phi^T x / sqrt(n).
    """
    v, squeeze = _as_matrix(x, dec.n)
    coef = dec.eigenvectors.T @ v / math.sqrt(dec.n)
    return coef[:, 0] if squeeze else coef


def reconstruct(dec: SpectralDecomposition, coef) -> np.ndarray:
    """Inverse of :func:`project`."""
    c = np.asarray(coef, dtype=np.float64)
    squeeze = c.ndim == 1
    if squeeze:
        c = c[:, None]
    if c.shape[0] != dec.n:
        raise ContractError("coefficient count does not match decomposition")
    out = math.sqrt(dec.n) * (dec.eigenvectors @ c)
    return out[:, 0] if squeeze else out


def l2_norm(x) -> float:
    """Norm in L2(G_n): sqrt((1/n) sum x_i^2), over all features."""
    v = np.asarray(x.values if isinstance(x, SignalVector) else x, dtype=np.float64)
    return float(np.sqrt(np.sum(v * v) / v.shape[0]))


# ---------------------------------------------------------------------------
# partitions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumPartition:
    """Contiguous groups of eigenvalue indices.

    ``groups`` holds half-open (start, stop) index ranges into the ascending
    spectrum.  ``diameters`` records max - min per group; with chained
    grouping a diameter can exceed the threshold, see ``oversized_groups``.
    """

    groups: Tuple[Tuple[int, int], ...]
    threshold_kind: str
    threshold: float
    eigenvalues: np.ndarray
    diameters: Tuple[float, ...]

    @property
    def group_count(self) -> int:
        return len(self.groups)

    @property
    def singleton_count(self) -> int:
        return sum(1 for a, b in self.groups if b - a == 1)

    def group_of(self) -> np.ndarray:
        """Group id for every eigenvalue index."""
        ids = np.empty(self.eigenvalues.size, dtype=int)
        for g, (a, b) in enumerate(self.groups):
            ids[a:b] = g
        return ids

    def oversized_groups(self):
        if self.threshold_kind == "alpha_difference":
            return [g for g, dm in enumerate(self.diameters) if dm > self.threshold]
        out = []
        for g, (a, b) in enumerate(self.groups):
            lo, hi = self.eigenvalues[a], self.eigenvalues[b - 1]
            if lo > ZERO_TOL and hi / lo - 1 > self.threshold:
                out.append(g)
        return out


def _separated(lo, hi, kind, threshold):
    if kind == "alpha_difference":
        return hi - lo > threshold
    return hi / lo - 1 > threshold


def partition_eigenvalues(lam, kind: str, threshold: float, exclude_zero: bool = False) -> SpectrumPartition:
    """Greedy consecutive-gap clustering of an ascending eigenvalue list."""
    if kind not in THRESHOLD_KINDS:
        raise ConfigurationError(f"unknown threshold kind {kind!r}")
    if not threshold > 0:
        raise ConfigurationError("threshold must be positive")
    lam = np.array(lam, dtype=np.float64)
    if lam.ndim != 1 or lam.size == 0:
        raise DataError("need a non-empty eigenvalue list")
    if np.any(np.diff(lam) < 0):
        raise DataError("eigenvalues must be ascending")
    start = 0
    if kind == "gamma_ratio":
        nz = np.abs(lam) <= ZERO_TOL
        if np.any(lam < -ZERO_TOL):
            raise DomainError("ratio partition needs nonnegative eigenvalues")
        if np.any(nz):
            if not exclude_zero:
                raise DomainError("ratio partition of a spectrum containing 0 needs exclude_zero")
            start = int(np.count_nonzero(nz))
    groups = []
    if start > 0:
        groups.append((0, start))
    a = start
    for i in range(start + 1, lam.size):
        if _separated(lam[i - 1], lam[i], kind, threshold):
            groups.append((a, i))
            a = i
    if a < lam.size:
        groups.append((a, lam.size))
    lam.setflags(write=False)
    diam = tuple(float(lam[b - 1] - lam[a]) for a, b in groups)
    return SpectrumPartition(tuple(groups), kind, float(threshold), lam, diam)


def partition_spectrum(dec: SpectralDecomposition, kind: str, threshold: float, exclude_zero: bool = False) -> SpectrumPartition:
    """Partition ``dec``'s spectrum into alpha- or gamma-separated groups."""
    return partition_eigenvalues(dec.eigenvalues, kind, threshold, exclude_zero)


# ---------------------------------------------------------------------------
# Weyl-law gap indices
# ---------------------------------------------------------------------------


def unit_ball_volume(d: int) -> float:
    """pi^(d/2) / Gamma(d/2 + 1)."""
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def _ceil(x):
    # shave float noise such as 1.0000000000000002 before rounding up
    return int(math.ceil(round(x, 9)))


def weyl_gap_index(d: int, volume: float, threshold: float, kind: str, c1: float) -> int:
    """Index past which consecutive eigenvalues fall inside one threshold group.

    Parameters
    ----------
    d : int
        Intrinsic dimension.
    volume : float
        Manifold volume.
    threshold : float
        alpha (difference mode) or gamma (ratio mode).
    kind : {"alpha_difference", "gamma_ratio"}
    c1 : float
        Weyl-law constant.
    """
    if kind not in THRESHOLD_KINDS:
        raise ConfigurationError(f"unknown threshold kind {kind!r}")
    if not (volume > 0 and threshold > 0 and c1 > 0) or d < 1:
        raise ConfigurationError("d, volume, threshold and c1 must be positive")
    if kind == "alpha_difference":
        if d <= 2:
            raise DomainError("difference-mode gap index needs d > 2")
        cd = unit_ball_volume(d)
        val = (threshold * d / c1) ** (d / (2 - d)) * (cd * volume) ** (2 / (2 - d))
        return _ceil(val)
    denom = c1 * (threshold + 1) ** (d / 2) - 1
    if denom <= 0:
        raise DomainError("ratio-mode gap index needs c1 (gamma + 1)^(d/2) > 1")
    return _ceil(1.0 / denom)
