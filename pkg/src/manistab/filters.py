"""Heat-kernel FIR filters h(L) = sum_k h_k exp(-k L) and their frequency responses."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.linalg
from numpy.polynomial import polynomial as P
from scipy.optimize import minimize_scalar

from .errors import ConfigurationError, ContractError, DataError, DomainError
from .geometry import SignalVector
from .spectral import SpectralDecomposition, SpectrumPartition

DEFAULT_GRID = 2000


@dataclass(frozen=True)
class FilterCoefficients:
    """Taps h_0 ... h_{K-1}."""

    taps: np.ndarray

    def __post_init__(self):
        t = np.array(self.taps, dtype=np.float64, copy=True).reshape(-1)
        if t.size < 1:
            raise DataError("a filter needs at least one tap")
        if not np.all(np.isfinite(t)):
            raise DataError("filter taps must be finite")
        t.setflags(write=False)
        object.__setattr__(self, "taps", t)

    @property
    def K(self) -> int:
        return self.taps.size

    def scaled(self, c: float) -> "FilterCoefficients":
        return FilterCoefficients(self.taps * c)


def _response(taps, lam):
    lam = np.asarray(lam, dtype=np.float64)
    k = np.arange(taps.size)
    return np.exp(-np.multiply.outer(lam, k)) @ taps


def _derivative(taps, lam):
    lam = np.asarray(lam, dtype=np.float64)
    k = np.arange(taps.size)
    return -(np.exp(-np.multiply.outer(lam, k)) @ (k * taps))


def _check_lambdas(lambdas):
    lam = np.asarray(lambdas, dtype=np.float64)
    if not np.all(np.isfinite(lam)):
        raise DataError("frequencies must be finite")
    if np.any(lam < 0):
        raise DomainError("frequencies must be nonnegative")
    return lam


def freq_response(h: FilterCoefficients, lambdas) -> np.ndarray:
    """hhat(lambda) = sum_k h_k exp(-k lambda)."""
    return _response(h.taps, _check_lambdas(lambdas))


def freq_derivative(h: FilterCoefficients, lambdas) -> np.ndarray:
    """hhat'(lambda) = -sum_k k h_k exp(-k lambda)."""
    return _derivative(h.taps, _check_lambdas(lambdas))


def response_at(h: FilterCoefficients, lambdas) -> np.ndarray:
    """Like :func:`freq_response` but also accepts slightly negative eigenvalues.

    Perturbed operators that are no longer Laplacians can have eigenvalues
    below zero; the response formula extends to them unchanged.
    """
    lam = np.asarray(lambdas, dtype=np.float64)
    if not np.all(np.isfinite(lam)):
        raise DataError("frequencies must be finite")
    return _response(h.taps, lam)


def filter_matrix(h: FilterCoefficients, dec: SpectralDecomposition) -> np.ndarray:
    """Dense h(L) = Phi diag(hhat(lambda)) Phi^T."""
    phi = dec.eigenvectors
    return (phi * response_at(h, dec.eigenvalues)) @ phi.T


def apply_filter(h: FilterCoefficients, dec: SpectralDecomposition, x) -> SignalVector:
    """Filter a signal pointwise in the frequency domain."""
    v = x.values if isinstance(x, SignalVector) else np.asarray(x, dtype=np.float64)
    if v.ndim == 1:
        v = v[:, None]
    if v.shape[0] != dec.n:
        raise ContractError(f"signal has {v.shape[0]} rows, decomposition has {dec.n}")
    phi = dec.eigenvectors
    coef = phi.T @ v
    coef *= response_at(h, dec.eigenvalues)[:, None]
    return SignalVector(phi @ coef)


# ---------------------------------------------------------------------------
# continuity constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContinuityConstants:
    lipschitz: float
    integral_lipschitz: float
    sup_abs_response: float
    lambda_range: Tuple[float, float]

    @property
    def non_amplifying(self) -> bool:
        return self.sup_abs_response <= 1.0 + 1e-12


def _check_range(lambda_range):
    lo, hi = float(lambda_range[0]), float(lambda_range[1])
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo < 0 or not hi > lo:
        raise ConfigurationError(f"need 0 <= lambda_lo < lambda_hi, got [{lo}, {hi}]")
    return lo, hi


def _poly_abs_max(coef, lo, hi):
    # hhat and -hhat' are polynomials in u = exp(-lambda); their extrema on an
    # interval sit at the endpoints or at real roots of the derivative
    u_lo, u_hi = np.exp(-hi), np.exp(-lo)
    cand = [u_lo, u_hi]
    scale = float(np.max(np.abs(coef))) if coef.size else 0.0
    # negligible top coefficients make the root finder unreliable
    core = P.polytrim(coef, tol=1e-14 * scale) if scale > 0 else coef[:1]
    if core.size > 2:
        roots = P.polyroots(P.polyder(core))
        # near-real pairs from double roots come back with tiny imaginary
        # parts; extra in-range candidates can only tighten the maximum
        cand.extend(r.real for r in roots if u_lo <= r.real <= u_hi)
    return float(np.max(np.abs(P.polyval(np.asarray(cand), coef))))


def sup_abs_response(h: FilterCoefficients, lambda_range) -> float:
    """Exact max |hhat| over the closed range."""
    lo, hi = _check_range(lambda_range)
    return _poly_abs_max(h.taps, lo, hi)


def continuity_constants(h: FilterCoefficients, lambda_range, grid_density: int = DEFAULT_GRID) -> ContinuityConstants:
    """Lipschitz constant A_h, integral Lipschitz constant B_h and sup |hhat|.

    All three start from the maximum over ``grid_density + 1`` evenly spaced
    points (so doubling the density refines the grid).  ``sup`` and ``A_h`` are
    then raised to their exact maxima, which are polynomial in exp(-lambda);
    ``B_h`` is refined by a bounded scalar search around the best grid point.
    """
    lo, hi = _check_range(lambda_range)
    if int(grid_density) < 100:
        raise ConfigurationError("grid_density must be at least 100")
    grid = np.linspace(lo, hi, int(grid_density) + 1)
    taps = h.taps
    d = _derivative(taps, grid)
    a_h = float(np.max(np.abs(d)))
    sup = float(np.max(np.abs(_response(taps, grid))))
    k = np.arange(taps.size)
    a_h = max(a_h, _poly_abs_max(k * taps, lo, hi))
    sup = max(sup, _poly_abs_max(taps, lo, hi))

    g = np.abs(grid * d)
    j = int(np.argmax(g))
    b_h = float(g[j])
    if b_h > 0:
        a, b = grid[max(j - 1, 0)], grid[min(j + 1, grid.size - 1)]
        res = minimize_scalar(
            lambda t: -abs(t * _derivative(taps, t)), bounds=(a, b), method="bounded", options={"xatol": 1e-12}
        )
        b_h = max(b_h, float(-res.fun))
    return ContinuityConstants(a_h, b_h, sup, (lo, hi))


# ---------------------------------------------------------------------------
# FDT / FRT check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThresholdReport:
    holds: bool
    worst_group: int
    worst_deviation: float
    group_deviations: Tuple[float, ...]


def verify_fdt_frt(h: FilterCoefficients, partition: SpectrumPartition, dec: SpectralDecomposition, delta: float) -> ThresholdReport:
    """Check max |hhat(l_i) - hhat(l_j)| <= delta inside every group."""
    if partition.eigenvalues.size != dec.n or not np.array_equal(partition.eigenvalues, dec.eigenvalues):
        raise ContractError("partition was not built from this decomposition")
    resp = response_at(h, dec.eigenvalues)
    devs = tuple(float(np.max(resp[a:b]) - np.min(resp[a:b])) for a, b in partition.groups)
    worst = int(np.argmax(devs))
    return ThresholdReport(devs[worst] <= delta, worst, devs[worst], devs)


# ---------------------------------------------------------------------------
# normalization and design
# ---------------------------------------------------------------------------


def normalize(h: FilterCoefficients, lambda_range) -> FilterCoefficients:
    """Divide the taps by max |hhat| over ``lambda_range``."""
    s = sup_abs_response(h, lambda_range)
    if s == 0.0:
        raise DomainError("cannot normalize a filter whose response vanishes on the range")
    return FilterCoefficients(h.taps / s)


@dataclass(frozen=True)
class DesignResult:
    """Output of :func:`design_filter`.

    ``filter`` is normalized unless ``zero_filter`` is set, in which case it
    holds the raw all-zero fit.
    """

    filter: FilterCoefficients
    residual: float
    zero_filter: bool
    lambda_range: Tuple[float, float]


def default_range(lam_max: float, pad: float = 1.1) -> Tuple[float, float]:
    return (0.0, max(float(lam_max), 0.0) * pad if lam_max > 0 else 1.0)


def design_filter(
    dec: SpectralDecomposition,
    partition: SpectrumPartition,
    group_targets,
    K: int,
    ridge: float = 1e-8,
    lambda_range: Optional[Tuple[float, float]] = None,
) -> DesignResult:
    """Least-squares fit of a piecewise-constant response over the groups.

    Parameters
    ----------
    dec : SpectralDecomposition
    partition : SpectrumPartition
        Groups of ``dec``'s eigenvalues.
    group_targets : sequence of float
        Desired response per group, each in [-1, 1].
    K : int
        Number of taps, at least 2.
    ridge : float
        Tikhonov weight added to the normal equations.
    lambda_range : tuple, optional
        Range used for normalization; defaults to [0, 1.1 lambda_max].

    Returns
    -------
    DesignResult
    """
    targets = np.asarray(group_targets, dtype=np.float64).reshape(-1)
    if targets.size != partition.group_count:
        raise ContractError(f"{targets.size} targets for {partition.group_count} groups")
    if np.any(np.abs(targets) > 1):
        raise ConfigurationError("group targets must lie in [-1, 1]")
    if int(K) < 2:
        raise ConfigurationError("design needs K >= 2")
    K = int(K)
    lam = dec.eigenvalues
    distinct = 1 + int(np.count_nonzero(np.diff(lam) > 1e-9))
    if K > distinct:
        warnings.warn(f"K={K} exceeds the {distinct} distinct eigenvalues; the fit is ill-posed", RuntimeWarning)
    y = targets[partition.group_of()]
    v = np.exp(-np.multiply.outer(lam, np.arange(K)))
    gram = v.T @ v + ridge * np.eye(K)
    taps = scipy.linalg.solve(gram, v.T @ y, assume_a="pos")
    rng_ = default_range(lam[-1]) if lambda_range is None else _check_range(lambda_range)
    raw = FilterCoefficients(taps)
    if not np.any(targets) or sup_abs_response(raw, rng_) == 0.0:
        zero = FilterCoefficients(np.zeros(K))
        return DesignResult(zero, float(np.max(np.abs(y))), True, rng_)
    h = normalize(raw, rng_)
    residual = float(np.max(np.abs(response_at(h, lam) - y)))
    return DesignResult(h, residual, False, rng_)
