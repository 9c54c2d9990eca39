"""Dense Gaussian-kernel graphs, their Laplacians, and controlled operator perturbations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import ConfigurationError, ContractError, DataError, InvariantError
from .geometry import PointCloud

OPERATOR_KINDS = ("adjacency", "laplacian", "generic_symmetric")
PERTURBATION_KINDS = ("absolute", "relative", "deformation")

SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class DenseOperator:
    """Symmetric n x n matrix tagged with what it represents.

    ``t_n`` is the kernel bandwidth the operator was built with, or ``None``
    for operators that did not come from a point cloud.
    """

    matrix: np.ndarray
    kind: str
    t_n: Optional[float] = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.float64, copy=True)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DataError(f"operator must be a square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise DataError("operator has non-finite entries")
        if self.kind not in OPERATOR_KINDS:
            raise ConfigurationError(f"unknown operator kind {self.kind!r}")
        asym = float(np.max(np.abs(m - m.T)))
        if asym > SYMMETRY_TOL:
            raise DataError(f"operator is not symmetric (max asymmetry {asym:.3e})")
        if self.kind == "adjacency":
            if np.any(m < 0) or np.any(np.diag(m) != 0):
                raise DataError("adjacency must be nonnegative with zero diagonal")
        elif self.kind == "laplacian":
            n = m.shape[0]
            scale = float(np.max(np.abs(m))) if m.size else 0.0
            if float(np.max(np.abs(m.sum(axis=1)))) > 1e-9 * n * max(scale, 1e-300):
                raise DataError("laplacian rows do not sum to zero")
        if self.t_n is not None and not self.t_n > 0:
            raise ConfigurationError("t_n must be positive")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class PerturbationOutcome:
    perturbed: DenseOperator
    perturbation_kind: str
    epsilon_nominal: float
    epsilon_measured: float

    def __post_init__(self):
        if self.perturbation_kind not in PERTURBATION_KINDS:
            raise ConfigurationError(f"unknown perturbation kind {self.perturbation_kind!r}")
        if self.perturbation_kind != "deformation" and (
            self.epsilon_measured > self.epsilon_nominal * (1 + 1e-9)
        ):
            raise InvariantError(
                f"measured perturbation {self.epsilon_measured} exceeds nominal {self.epsilon_nominal}"
            )


def default_bandwidth(n: int, d: int, alpha_kernel: float) -> float:
    """t_n = n^(-1/(d + 2 + alpha))."""
    return float(n) ** (-1.0 / (d + 2 + alpha_kernel))


def build_graph(
    cloud: PointCloud,
    alpha_kernel: float = 1.0,
    t_n_override: Optional[float] = None,
    exponent_dim: Optional[int] = None,
) -> DenseOperator:
    """Complete graph with heat-kernel weights.

    Parameters
    ----------
    cloud : PointCloud
        Sample points; ``cloud.intrinsic_dim`` sets d.
    alpha_kernel : float
        Rate parameter in the default bandwidth n^(-1/(d+2+alpha)).
    t_n_override : float, optional
        Use this bandwidth instead of the default.
    exponent_dim : int, optional
        Dimension used in the normalizing power (4 pi t)^(dim/2); defaults to d.

    Returns
    -------
    DenseOperator
        Adjacency with w_ij = exp(-|x_i - x_j|^2 / 4t) / (n t (4 pi t)^(dim/2)).
    """
    n = cloud.n
    if n < 2:
        raise ConfigurationError("a graph needs at least two points")
    if not alpha_kernel > 0:
        raise ConfigurationError("alpha_kernel must be positive")
    d = cloud.intrinsic_dim
    t = default_bandwidth(n, d, alpha_kernel) if t_n_override is None else float(t_n_override)
    if not t > 0:
        raise ConfigurationError("t_n must be positive")
    k = d if exponent_dim is None else int(exponent_dim)
    # squareform(pdist) is exactly symmetric with an exactly zero diagonal
    sq = squareform(pdist(cloud.points, "sqeuclidean"))
    scale = 1.0 / (n * t * (4 * np.pi * t) ** (k / 2))
    w = scale * np.exp(-sq / (4 * t))
    np.fill_diagonal(w, 0.0)
    return DenseOperator(w, "adjacency", t)


def laplacian(adj: DenseOperator) -> DenseOperator:
    """L = diag(A 1) - A."""
    if adj.kind != "adjacency":
        raise ContractError(f"laplacian needs an adjacency operator, got {adj.kind}")
    a = adj.matrix
    lap = -a.copy()
    lap[np.diag_indices_from(lap)] = a.sum(axis=1)
    return DenseOperator(lap, "laplacian", adj.t_n)


def op_norm(m) -> float:
    """Spectral norm of a symmetric matrix (largest-magnitude eigenvalue)."""
    m = m.matrix if isinstance(m, DenseOperator) else np.asarray(m, dtype=np.float64)
    if m.size == 0:
        return 0.0
    ev = np.linalg.eigvalsh(m)
    return float(max(abs(ev[0]), abs(ev[-1])))


def _check_perturbable(op, epsilon):
    if op.kind not in ("laplacian", "generic_symmetric"):
        raise ContractError(f"cannot perturb an operator of kind {op.kind}")
    if not np.isfinite(epsilon) or epsilon < 0:
        raise ConfigurationError(f"epsilon must be a nonnegative number, got {epsilon}")


def perturb_absolute(op: DenseOperator, epsilon: float, seed: int) -> PerturbationOutcome:
    """L' = L + A with A a random symmetric matrix scaled to ||A||_op = epsilon."""
    _check_perturbable(op, epsilon)
    epsilon = float(epsilon)
    if epsilon == 0.0:
        return PerturbationOutcome(DenseOperator(op.matrix, "generic_symmetric", op.t_n), "absolute", 0.0, 0.0)
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((op.n, op.n))
    s = (g + g.T) / 2
    a = epsilon * s / op_norm(s)
    a = (a + a.T) / 2
    measured = op_norm(a)
    if measured > epsilon:
        # rounding can overshoot by an ulp or two
        a *= epsilon / measured
        measured = op_norm(a)
    return PerturbationOutcome(
        DenseOperator(op.matrix + a, "generic_symmetric", op.t_n), "absolute", epsilon, min(measured, epsilon)
    )


def perturb_relative(op: DenseOperator, epsilon: float, seed: int, mode: str = "uniform", dec=None) -> PerturbationOutcome:
    """L' = L + E L with E diagonal in the eigenbasis of L.

    Parameters
    ----------
    mode : {"uniform", "constant"}
        ``uniform`` draws e_i ~ U[-eps, eps] per eigenvector; ``constant``
        draws a single e and returns exactly (1 + e) L.
    dec : SpectralDecomposition, optional
        Precomputed decomposition of ``op``.
    """
    _check_perturbable(op, epsilon)
    epsilon = float(epsilon)
    if epsilon == 0.0:
        return PerturbationOutcome(DenseOperator(op.matrix, "generic_symmetric", op.t_n), "relative", 0.0, 0.0)
    rng = np.random.default_rng(seed)
    if mode == "constant":
        e = float(rng.uniform(-epsilon, epsilon))
        return PerturbationOutcome(
            DenseOperator(op.matrix + e * op.matrix, "generic_symmetric", op.t_n), "relative", epsilon, abs(e)
        )
    if mode != "uniform":
        raise ConfigurationError(f"unknown relative perturbation mode {mode!r}")
    if dec is None:
        from .spectral import eigendecompose

        dec = eigendecompose(op)
    if dec.n != op.n:
        raise ContractError("decomposition does not match operator size")
    e = rng.uniform(-epsilon, epsilon, op.n)
    phi = dec.eigenvectors
    el = (phi * (e * dec.eigenvalues)) @ phi.T
    el = (el + el.T) / 2
    return PerturbationOutcome(
        DenseOperator(op.matrix + el, "generic_symmetric", op.t_n), "relative", epsilon, float(np.max(np.abs(e)))
    )
