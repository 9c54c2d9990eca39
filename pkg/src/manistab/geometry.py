"""Point clouds sampled from analytic manifolds, signals on them, deformations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ConfigurationError, ContractError, DataError

MANIFOLD_KINDS = ("sphere2", "torus2", "plane_patch", "external")
DEFORMATION_KINDS = ("gaussian_coordinate", "smooth_field")

TORUS_MAJOR = 2.0
TORUS_MINOR = 1.0

_AMBIENT_DIM = {"sphere2": 3, "torus2": 3, "plane_patch": 2}
_SEED_MAX = 2**64 - 1


def _check_seed(seed):
    seed = int(seed)
    if not 0 <= seed <= _SEED_MAX:
        raise ConfigurationError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def _frozen(a):
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PointCloud:
    """n points in ambient coordinates plus where they came from.

    ``points`` has shape (n, N_amb) and is read-only.
    """

    points: np.ndarray
    manifold_kind: str
    intrinsic_dim: int
    seed: int

    def __post_init__(self):
        pts = _frozen(self.points)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise DataError(f"points must be a non-empty (n, N_amb) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise DataError("points contain non-finite coordinates")
        if self.manifold_kind not in MANIFOLD_KINDS:
            raise ConfigurationError(f"unknown manifold kind {self.manifold_kind!r}")
        if int(self.intrinsic_dim) < 1 or pts.shape[1] < int(self.intrinsic_dim):
            raise DataError(
                f"intrinsic_dim={self.intrinsic_dim} incompatible with ambient dimension {pts.shape[1]}"
            )
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "intrinsic_dim", int(self.intrinsic_dim))
        object.__setattr__(self, "seed", _check_seed(self.seed))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class SignalVector:
    """Graph signal with one row per point and one column per feature."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64, copy=True)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[1] < 1:
            raise DataError(f"signal must be (n,) or (n, F), got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise DataError("signal contains non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def feature_count(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class GaussianBump:
    """exp(-|x - center|^2 / (2 width^2)); equals 1 at the center."""

    center: tuple
    width: float

    def __post_init__(self):
        if not self.width > 0:
            raise ConfigurationError("gaussian bump width must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))


SignalSpec = Union[str, GaussianBump]


@dataclass(frozen=True)
class DeformationSpec:
    kind: str
    epsilon: float
    seed: int
    bandlimit: int = 2

    def __post_init__(self):
        if self.kind not in DEFORMATION_KINDS:
            raise ConfigurationError(f"unknown deformation kind {self.kind!r}")
        if not self.epsilon >= 0:
            raise ConfigurationError(f"epsilon must be nonnegative, got {self.epsilon}")
        if self.kind == "smooth_field" and int(self.bandlimit) < 1:
            raise ConfigurationError("smooth_field needs bandlimit >= 1")
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "seed", _check_seed(self.seed))
        object.__setattr__(self, "bandlimit", int(self.bandlimit))


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def _sample_torus(rng, n):
    # accept theta with probability proportional to the area element R + r cos(theta)
    out = []
    have = 0
    while have < n:
        m = max(2 * (n - have), 16)
        theta = rng.uniform(0.0, 2 * np.pi, m)
        u = rng.uniform(0.0, 1.0, m)
        keep = u < (TORUS_MAJOR + TORUS_MINOR * np.cos(theta)) / (TORUS_MAJOR + TORUS_MINOR)
        theta = theta[keep]
        phi = rng.uniform(0.0, 2 * np.pi, theta.size)
        ring = TORUS_MAJOR + TORUS_MINOR * np.cos(theta)
        out.append(np.column_stack([ring * np.cos(phi), ring * np.sin(phi), TORUS_MINOR * np.sin(theta)]))
        have += theta.size
    return np.concatenate(out)[:n]


def sample_manifold(kind: str, n: int, seed: int) -> PointCloud:
    """Draw ``n`` points i.i.d. uniform w.r.t. the surface measure of ``kind``."""
    if kind not in _AMBIENT_DIM:
        raise ConfigurationError(f"cannot sample manifold kind {kind!r}")
    if int(n) < 1:
        raise ConfigurationError(f"need n >= 1, got {n}")
    n = int(n)
    seed = _check_seed(seed)
    rng = np.random.default_rng(seed)
    if kind == "sphere2":
        g = rng.standard_normal((n, 3))
        pts = g / np.linalg.norm(g, axis=1, keepdims=True)
    elif kind == "torus2":
        pts = _sample_torus(rng, n)
    else:
        pts = rng.uniform(0.0, 1.0, (n, 2))
    return PointCloud(pts, kind, 2, seed)


def manifold_volume(kind: str) -> float:
    """Surface area of the analytic manifold (unit sphere, fixed torus, unit square)."""
    if kind == "sphere2":
        return 4 * np.pi
    if kind == "torus2":
        return 4 * np.pi**2 * TORUS_MAJOR * TORUS_MINOR
    if kind == "plane_patch":
        return 1.0
    raise ConfigurationError(f"no analytic volume for manifold kind {kind!r}")


# ---------------------------------------------------------------------------
# signals
# ---------------------------------------------------------------------------


def evaluate_signal(cloud: PointCloud, spec: SignalSpec) -> SignalVector:
    """Sample a manifold function at the cloud's points, [x]_i = f(x_i)."""
    pts = cloud.points
    if isinstance(spec, GaussianBump):
        c = np.asarray(spec.center)
        if c.shape != (cloud.ambient_dim,):
            raise ConfigurationError(
                f"bump center has {c.size} coordinates, cloud has {cloud.ambient_dim}"
            )
        r2 = np.sum((pts - c) ** 2, axis=1)
        return SignalVector(np.exp(-r2 / (2 * spec.width**2)))
    if spec == "coordinates":
        return SignalVector(pts)
    if spec == "constant":
        return SignalVector(np.ones(cloud.n))
    if spec == "first_harmonic":
        if cloud.manifold_kind != "sphere2":
            raise ConfigurationError("first_harmonic is only defined on sphere2")
        return SignalVector(pts[:, 2])
    raise ConfigurationError(f"unknown signal spec {spec!r}")


# ---------------------------------------------------------------------------
# deformations
# ---------------------------------------------------------------------------


def _reference_points(kind):
    # fixed dense sample used to estimate the sup-norm of a smooth field
    if kind in ("sphere2", "torus2"):
        return sample_manifold(kind, 20000, 0x5EED).points
    if kind == "plane_patch":
        g = np.linspace(0.0, 1.0, 141)
        return np.array(list(itertools.product(g, g)))
    return None


def _monomial_exponents(dim, degree):
    exps = []
    for total in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(dim), total):
            e = [0] * dim
            for j in combo:
                e[j] += 1
            exps.append(e)
    return np.array(exps)


class _SmoothField:
    """Seed-selected bandlimited vector field in ambient coordinates.

    Polynomials of degree <= bandlimit for curved manifolds (their restriction
    to the sphere is a finite spherical-harmonic expansion), trigonometric
    polynomials on the flat patch.
    """

    def __init__(self, kind, dim, bandlimit, rng):
        self.kind = kind
        self.dim = dim
        if kind == "plane_patch":
            freqs = [f for f in itertools.product(range(bandlimit + 1), repeat=dim) if any(f)]
            self.freqs = np.array(freqs, dtype=float)
            self.cos_coef = rng.standard_normal((len(freqs), dim))
            self.sin_coef = rng.standard_normal((len(freqs), dim))
        else:
            self.exps = _monomial_exponents(dim, bandlimit)
            self.coef = rng.standard_normal((len(self.exps), dim))

    def raw(self, x):
        if self.kind == "plane_patch":
            arg = 2 * np.pi * x @ self.freqs.T
            v = np.cos(arg) @ self.cos_coef + np.sin(arg) @ self.sin_coef
        else:
            mono = np.prod(x[:, None, :] ** self.exps[None, :, :], axis=2)
            v = mono @ self.coef
        if self.kind == "sphere2":
            # tangent field keeps the re-projected displacement below epsilon
            v = v - np.sum(v * x, axis=1, keepdims=True) * x
        return v


def deform(cloud: PointCloud, spec: DeformationSpec) -> PointCloud:
    """Apply the deformation tau described by ``spec`` to every point."""
    if spec.epsilon == 0.0:
        return cloud
    rng = np.random.default_rng(spec.seed)
    pts = cloud.points
    if spec.kind == "gaussian_coordinate":
        # mean eps, variance 2 eps on every coordinate; deliberately off-manifold
        noise = rng.normal(spec.epsilon, np.sqrt(2 * spec.epsilon), pts.shape)
        return PointCloud(pts + noise, "external", cloud.intrinsic_dim, spec.seed)

    field_ = _SmoothField(cloud.manifold_kind, cloud.ambient_dim, spec.bandlimit, rng)
    v = field_.raw(pts)
    sup = float(np.max(np.linalg.norm(v, axis=1)))
    ref = _reference_points(cloud.manifold_kind)
    if ref is not None and ref.shape[1] == cloud.ambient_dim:
        sup = max(sup, float(np.max(np.linalg.norm(field_.raw(ref), axis=1))))
    if sup == 0.0:
        return cloud
    moved = pts + spec.epsilon * v / sup
    if cloud.manifold_kind == "sphere2":
        moved = moved / np.linalg.norm(moved, axis=1, keepdims=True)
        return PointCloud(moved, "sphere2", cloud.intrinsic_dim, spec.seed)
    return PointCloud(moved, "external", cloud.intrinsic_dim, spec.seed)


def require_same_size(cloud: PointCloud, signal: SignalVector):
    if cloud.n != signal.n:
        raise ContractError(f"signal has {signal.n} rows but cloud has {cloud.n} points")
