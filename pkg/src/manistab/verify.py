"""Self-check suites run by ``manistab verify``.

Each suite returns a dict with a ``violations`` count and per-check detail;
randomness flows from one master seed through ``SeedSequence`` children.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError
from .filters import FilterCoefficients, apply_filter
from .geometry import evaluate_signal, sample_manifold
from .graph import DenseOperator, build_graph, laplacian, perturb_absolute, perturb_relative
from .mnn import MnnConfig, Sample, gradient_check, init_model
from .spectral import eigendecompose
from .stability import check_davis_kahan, check_relative_eigenvalues, check_weyl, time_domain_filter

SUITES = ("lemmas", "filters", "gradients", "all")


def _children(seed, count):
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in np.random.SeedSequence(int(seed)).spawn(count)]


def _random_symmetric(rng, n):
    g = rng.standard_normal((n, n))
    return DenseOperator((g + g.T) / 2, "generic_symmetric")


def lemma_suite(trials: int = 100, n: int = 50, seed: int = 0) -> dict:
    """Weyl, relative-eigenvalue and Davis-Kahan inequalities on random operators.

    Every trial draws a random symmetric L, an absolute perturbation with
    log-uniform size in [1e-4, 1e-1] and a commuting relative perturbation
    of the same size; Davis-Kahan is checked on a random contiguous block of
    eigen-indices.
    """
    worst = {"weyl": 0.0, "relative": 0.0, "davis_kahan": 0.0}
    viol = {"weyl": 0, "relative": 0, "davis_kahan": 0}
    for s in _children(seed, trials):
        rng = np.random.default_rng(s)
        L = _random_symmetric(rng, n)
        eps = float(10 ** rng.uniform(-4, -1))
        pa = perturb_absolute(L, eps, int(rng.integers(2**63)))
        pr = perturb_relative(L, eps, int(rng.integers(2**63)))
        w = check_weyl(L, pa.perturbed)
        r = check_relative_eigenvalues(L, pr.perturbed, pr.epsilon_measured)
        size = int(rng.integers(1, 6))
        start = int(rng.integers(0, n - size + 1))
        dk = check_davis_kahan(L, pa.perturbed, range(start, start + size))
        for name, c in (("weyl", w), ("relative", r), ("davis_kahan", dk)):
            viol[name] += int(not c.holds)
            if c.rhs > 0:
                worst[name] = max(worst[name], c.lhs / c.rhs)
    return {"trials": trials, "n": n, "violations": sum(viol.values()), "by_lemma": viol, "worst_ratio": worst}


def filter_suite(cases: int = 20, n: int = 40, seed: int = 0) -> dict:
    """Spectral filtering against the matrix-exponential path, plus pointwise action."""
    if n > 60:
        raise ConfigurationError("filter suite is limited to n <= 60")
    worst_path = 0.0
    worst_point = 0.0
    for s in _children(seed, cases):
        rng = np.random.default_rng(s)
        cloud = sample_manifold("sphere2", n, int(rng.integers(2**63)))
        L = laplacian(build_graph(cloud))
        dec = eigendecompose(L)
        h = FilterCoefficients(rng.standard_normal(5))
        x = rng.standard_normal(n)
        z = apply_filter(h, dec, x).values[:, 0]
        ref = time_domain_filter(h, L) @ x
        worst_path = max(worst_path, float(np.linalg.norm(z - ref) / max(np.linalg.norm(ref), 1e-300)))
        j = int(rng.integers(n))
        phi = dec.eigenvectors[:, j]
        zj = apply_filter(h, dec, phi).values[:, 0]
        lam = dec.eigenvalues[j]
        hval = float(np.sum(h.taps * np.exp(-np.arange(h.K) * lam)))
        worst_point = max(worst_point, float(np.max(np.abs(zj - hval * phi))))
    viol = int(worst_path > 1e-8) + int(worst_point > 1e-8)
    return {"cases": cases, "n": n, "violations": viol, "worst_path_rel_error": worst_path, "worst_pointwise_error": worst_point}


def gradient_suite(seeds: int = 3, n: int = 12, seed: int = 0, tol: float = 1e-4) -> dict:
    """Finite-difference check on (3, 4, 1) networks with K = 3 and tanh."""
    results = []
    for s in _children(seed, seeds):
        rng = np.random.default_rng(s)
        cloud = sample_manifold("sphere2", n, int(rng.integers(2**63)))
        dec = eigendecompose(laplacian(build_graph(cloud)))
        X = evaluate_signal(cloud, "coordinates").values
        model = init_model(MnnConfig((3, 4, 1), 3, "tanh_normalized"), int(rng.integers(2**63)))
        model = model.with_parameters([p * 10 for p in model.parameters()])
        batch = [Sample(dec, X, 1), Sample(dec, X[::-1].copy(), 0)]
        results.append(gradient_check(model, batch, regularizer_weight=0.1, a_target=0.05, b_target=0.05))
    return {"seeds": seeds, "n": n, "violations": sum(int(r > tol) for r in results), "worst_rel_error": results}


def run_suite(name: str, trials: int = 100, n: int = 50, seed: int = 0) -> dict:
    if name not in SUITES:
        raise ConfigurationError(f"unknown suite {name!r}")
    out = {}
    if name in ("lemmas", "all"):
        out["lemmas"] = lemma_suite(trials, n, seed)
    if name in ("filters", "all"):
        out["filters"] = filter_suite(20, min(n, 60), seed)
    if name in ("gradients", "all"):
        out["gradients"] = gradient_suite(3, 12, seed)
    out["violations"] = sum(v["violations"] for v in out.values())
    return out

