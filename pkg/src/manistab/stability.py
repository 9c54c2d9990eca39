"""Closed-form stability bounds, perturbation experiments, lemma checks and a convergence study."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np
from scipy.linalg import expm
from scipy.spatial import cKDTree

from .errors import ConfigurationError, DomainError, PreconditionError
from .filters import (
    FilterCoefficients,
    apply_filter,
    continuity_constants,
    design_filter,
    verify_fdt_frt,
)
from .geometry import DeformationSpec, PointCloud, deform, evaluate_signal, sample_manifold
from .graph import DenseOperator, build_graph, laplacian, op_norm, perturb_absolute, perturb_relative
from .mnn import MnnConfig, MnnModel, forward
from .spectral import SpectralDecomposition, eigendecompose, l2_norm, partition_spectrum

HOLD_SLACK = 1e-12


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundInputs:
    """Everything a bound evaluator may need; unused fields stay ``None``."""

    epsilon: float
    alpha: Optional[float] = None
    gamma: Optional[float] = None
    delta: Optional[float] = None
    A_h: Optional[float] = None
    B_h: Optional[float] = None
    N: Optional[int] = None
    N_s: Optional[int] = None
    M: Optional[int] = None
    M_s: Optional[int] = None
    L_layers: Optional[int] = None
    F_width: Optional[int] = None
    C_per: Optional[float] = None
    kind: str = "absolute"

    def __post_init__(self):
        for name in ("epsilon", "alpha", "gamma", "delta", "A_h", "B_h", "N", "N_s", "M", "M_s", "L_layers", "F_width", "C_per"):
            v = getattr(self, name)
            if v is not None and not (np.isfinite(v) and v >= 0):
                raise ConfigurationError(f"{name} must be a nonnegative number, got {v}")
        if self.kind not in ("absolute", "relative"):
            raise ConfigurationError(f"unknown bound kind {self.kind!r}")


def _need(inp, *names):
    missing = [n for n in names if getattr(inp, n) is None]
    if missing:
        raise ConfigurationError("missing bound inputs: " + ", ".join(missing))


def bound_filter_absolute(inp: BoundInputs, form: str = "theorem") -> float:
    """Output-deviation bound for an absolute perturbation of size epsilon.

    ``form="theorem"`` uses the supplied delta:
    pi N_s eps / (alpha - eps) + A_h eps + 2 (N - N_s) delta.
    ``form="corollary"`` ties delta to epsilon and returns
    (pi N / (alpha - eps) + A_h) eps.
    """
    _need(inp, "alpha", "A_h", "N")
    eps, a = inp.epsilon, inp.alpha
    if not eps < a:
        raise PreconditionError(f"absolute bound needs epsilon < alpha (epsilon={eps}, alpha={a})")
    if form == "corollary":
        return (math.pi * inp.N / (a - eps) + inp.A_h) * eps
    if form != "theorem":
        raise ConfigurationError(f"unknown bound form {form!r}")
    _need(inp, "N_s", "delta")
    if inp.N_s > inp.N:
        raise ConfigurationError("N_s cannot exceed N")
    return math.pi * inp.N_s * eps / (a - eps) + inp.A_h * eps + 2 * (inp.N - inp.N_s) * inp.delta


def bound_filter_relative(inp: BoundInputs, form: str = "theorem") -> float:
    """Output-deviation bound for a relative perturbation of size epsilon.

    ``form="theorem"`` is pi M eps / (gamma - eps + gamma eps) + 2 B_h eps / (2 - eps),
    valid for filters whose in-group spread is at most
    pi eps / (2 gamma - 2 eps + 2 gamma eps).  ``form="general"`` takes the
    measured delta instead:
    pi M_s eps / (gamma - eps + gamma eps) + 2 B_h eps / (2 - eps) + 2 (M - M_s) delta.
    """
    _need(inp, "gamma", "B_h")
    eps, g = inp.epsilon, inp.gamma
    if not eps < g:
        raise PreconditionError(f"relative bound needs epsilon < gamma (epsilon={eps}, gamma={g})")
    if eps >= 2:
        raise DomainError("relative bound needs epsilon < 2")
    denom = g - eps + g * eps
    lip = 2 * inp.B_h * eps / (2 - eps)
    if form == "theorem":
        _need(inp, "M")
        return math.pi * inp.M * eps / denom + lip
    if form != "general":
        raise ConfigurationError(f"unknown bound form {form!r}")
    _need(inp, "M", "M_s", "delta")
    if inp.M_s > inp.M:
        raise ConfigurationError("M_s cannot exceed M")
    return math.pi * inp.M_s * eps / denom + lip + 2 * (inp.M - inp.M_s) * inp.delta


def perturbation_constant(inp: BoundInputs) -> float:
    """C_per = pi N / alpha + A_h (absolute) or pi M / gamma + B_h (relative)."""
    if inp.kind == "absolute":
        _need(inp, "N", "alpha", "A_h")
        if inp.alpha == 0:
            raise DomainError("alpha must be positive")
        return math.pi * inp.N / inp.alpha + inp.A_h
    _need(inp, "M", "gamma", "B_h")
    if inp.gamma == 0:
        raise DomainError("gamma must be positive")
    return math.pi * inp.M / inp.gamma + inp.B_h


def bound_mnn(inp: BoundInputs) -> float:
    """L F^(L-1) C_per eps, deriving C_per from the partition data when not given."""
    _need(inp, "L_layers", "F_width")
    if inp.L_layers < 1 or inp.F_width < 1:
        raise ConfigurationError("L_layers and F_width must be at least 1")
    c = inp.C_per if inp.C_per is not None else perturbation_constant(inp)
    return inp.L_layers * inp.F_width ** (inp.L_layers - 1) * c * inp.epsilon


# ---------------------------------------------------------------------------
# lemma checks
# ---------------------------------------------------------------------------


class LemmaCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def _matrix(op):
    return op.matrix if isinstance(op, DenseOperator) else np.asarray(op, dtype=np.float64)


def check_weyl(L, L_prime, slack: float = 1e-9) -> LemmaCheck:
    """max_i |lambda_i - lambda'_i| <= ||L' - L||_op for sorted spectra."""
    a, b = _matrix(L), _matrix(L_prime)
    lhs = float(np.max(np.abs(np.linalg.eigvalsh(a) - np.linalg.eigvalsh(b))))
    rhs = op_norm(b - a)
    return LemmaCheck(lhs, rhs, lhs <= rhs + slack)


def check_relative_eigenvalues(L, L_prime, epsilon: float, slack: float = 1e-9) -> LemmaCheck:
    """|lambda_i - lambda'_i| <= eps |lambda_i|; lhs/rhs report the worst index."""
    lam = np.linalg.eigvalsh(_matrix(L))
    lam2 = np.linalg.eigvalsh(_matrix(L_prime))
    gap = np.abs(lam - lam2) - epsilon * np.abs(lam)
    i = int(np.argmax(gap))
    return LemmaCheck(float(abs(lam[i] - lam2[i])), float(epsilon * abs(lam[i])), bool(gap[i] <= slack))


def check_davis_kahan(L, L_prime, group: Sequence[int], slack: float = 1e-9) -> LemmaCheck:
    """Projector distance against (pi/2) ||L' - L|| / d for the eigenvalues indexed by ``group``.

    sigma / omega are the selected eigenvalues of L / L', Sigma / Omega the
    rest; d is the smaller of dist(sigma, Omega) and dist(Sigma, omega).
    """
    a, b = _matrix(L), _matrix(L_prime)
    n = a.shape[0]
    idx = np.unique(np.asarray(group, dtype=int))
    if idx.size == 0 or idx[0] < 0 or idx[-1] >= n:
        raise ConfigurationError("group must be a non-empty set of valid eigenvalue indices")
    lam, phi = np.linalg.eigh(a)
    lam2, phi2 = np.linalg.eigh(b)
    rest = np.setdiff1d(np.arange(n), idx)
    if rest.size == 0:
        d = math.inf
    else:
        d = min(
            float(np.min(np.abs(np.subtract.outer(lam[idx], lam2[rest])))),
            float(np.min(np.abs(np.subtract.outer(lam[rest], lam2[idx])))),
        )
    if d == 0:
        raise DomainError("spectral gap between the group and its complement is zero")
    p = phi[:, idx] @ phi[:, idx].T
    p2 = phi2[:, idx] @ phi2[:, idx].T
    lhs = op_norm((p - p2 + (p - p2).T) / 2)
    rhs = 0.0 if math.isinf(d) else math.pi / 2 * op_norm(b - a) / d
    return LemmaCheck(lhs, rhs, lhs <= rhs * (1 + slack) + slack)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrialRecord:
    kind: str
    n: int
    epsilon: float
    trial: int
    seed: int
    epsilon_measured: float
    empirical: float
    bound: Optional[float]
    holds: Optional[bool]
    skipped: bool = False
    extra: Dict[str, float] = field(default_factory=dict)


@dataclass
class StabilityReport:
    """Per-trial records plus the constants that entered the bounds."""

    kind: str
    trials: List[TrialRecord]
    constants: Dict[str, object] = field(default_factory=dict)

    @property
    def violation_count(self) -> int:
        return sum(1 for t in self.trials if t.holds is False)

    @property
    def skipped_count(self) -> int:
        return sum(1 for t in self.trials if t.skipped)

    @property
    def max_ratio(self) -> float:
        r = [t.empirical / t.bound for t in self.trials if not t.skipped and t.bound]
        return float(max(r)) if r else 0.0

    def epsilons(self) -> List[float]:
        return sorted({t.epsilon for t in self.trials})

    def by_epsilon(self, key: str = "empirical", stat=np.mean) -> Dict[float, float]:
        out = {}
        for e in self.epsilons():
            vals = [getattr(t, key) if hasattr(t, key) else t.extra[key] for t in self.trials if t.epsilon == e and not t.skipped]
            out[e] = float(stat(vals)) if vals else math.nan
        return out

    def summary(self) -> Dict[str, object]:
        return {
            "max_ratio": self.max_ratio,
            "violation_count": self.violation_count,
            "skipped_count": self.skipped_count,
            "median_empirical": {repr(k): v for k, v in self.by_epsilon("empirical", np.median).items()},
        }


def _trial_streams(seed, ei, t):
    ss = np.random.SeedSequence([int(seed), ei, t])
    s_pert, s_sig = ss.generate_state(2, dtype=np.uint64)
    return int(s_pert), np.random.default_rng(int(s_sig))


def _run_trials(jobs, fn, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, jobs))
    return [fn(j) for j in jobs]


def _perturb(op, kind, eps, pseed, dec, relative_mode="uniform"):
    if kind == "absolute":
        return perturb_absolute(op, eps, pseed)
    if kind == "relative":
        return perturb_relative(op, eps, pseed, mode=relative_mode, dec=dec)
    raise ConfigurationError(f"unknown perturbation kind {kind!r}")


# ---------------------------------------------------------------------------
# filter experiment
# ---------------------------------------------------------------------------


def filter_constants(dec: SpectralDecomposition, h: FilterCoefficients, kind: str, threshold: float, eps_max: float, grid_density: int = 4000) -> Dict[str, object]:
    """Partition, measured delta and continuity constants for one filter."""
    lam_max = float(dec.eigenvalues[-1])
    if kind == "absolute":
        part = partition_spectrum(dec, "alpha_difference", threshold)
        top = 1.1 * (lam_max + eps_max)
    elif kind == "relative":
        part = partition_spectrum(dec, "gamma_ratio", threshold, exclude_zero=True)
        top = 1.1 * lam_max * (1 + eps_max)
    else:
        raise ConfigurationError(f"unknown perturbation kind {kind!r}")
    rng_ = (0.0, max(top, 1e-12))
    cc = continuity_constants(h, rng_, grid_density)
    fdt = verify_fdt_frt(h, part, dec, math.inf)
    return {
        "kind": kind,
        "threshold": float(threshold),
        "delta": fdt.worst_deviation,
        "group_deviations": list(fdt.group_deviations),
        "A_h": cc.lipschitz,
        "B_h": cc.integral_lipschitz,
        "sup_abs_response": cc.sup_abs_response,
        "lambda_range": list(rng_),
        "groups": [list(g) for g in part.groups],
        "group_count": part.group_count,
        "singleton_count": part.singleton_count,
        "oversized_groups": part.oversized_groups(),
    }


def filter_bound(constants: Dict[str, object], eps: float) -> float:
    """Bound for one filter at perturbation size ``eps``, using the measured delta.

    A zero perturbation leaves the operator untouched, so its bound is 0
    rather than the leftover 2 (N - N_s) delta term.
    """
    c = constants
    if eps == 0:
        return 0.0
    if c["kind"] == "absolute":
        inp = BoundInputs(eps, alpha=c["threshold"], delta=c["delta"], A_h=c["A_h"], N=c["group_count"], N_s=c["singleton_count"])
        return bound_filter_absolute(inp, "theorem")
    inp = BoundInputs(
        eps, gamma=c["threshold"], delta=c["delta"], B_h=c["B_h"], M=c["group_count"], M_s=c["singleton_count"], kind="relative"
    )
    return bound_filter_relative(inp, "general")


def run_filter_stability_experiment(
    op: DenseOperator,
    h: FilterCoefficients,
    kind: str,
    epsilons: Sequence[float],
    trials_per_eps: int,
    seed: int,
    threshold: float,
    dec: Optional[SpectralDecomposition] = None,
    relative_mode: str = "uniform",
    threads: int = 1,
) -> StabilityReport:
    """Perturb ``op`` repeatedly and compare ||h(L) f - h(L') f|| / ||f|| with the bound.

    Parameters
    ----------
    op : DenseOperator
        The unperturbed Laplacian.
    h : FilterCoefficients
        A filter with sup |hhat| <= 1 on the working range.
    kind : {"absolute", "relative"}
    epsilons : sequence of float
        Nominal perturbation sizes; sizes at or above ``threshold`` are
        recorded as skipped trials.
    trials_per_eps : int
    seed : int
        Master seed; trial streams are derived from (seed, eps index, trial).
    threshold : float
        alpha (absolute) or gamma (relative) used to partition the spectrum.
    threads : int
        Worker threads; results do not depend on it.
    """
    if dec is None:
        dec = eigendecompose(op)
    eps_list = [float(e) for e in epsilons]
    if any(e < 0 for e in eps_list):
        raise ConfigurationError("epsilons must be nonnegative")
    valid = [e for e in eps_list if e < threshold]
    consts = filter_constants(dec, h, kind, threshold, max(valid, default=0.0))
    if consts["sup_abs_response"] > 1 + 1e-9:
        raise PreconditionError(f"filter is not normalized (sup |hhat| = {consts['sup_abs_response']:.6g})")

    n = op.n

    def one(job):
        ei, eps, t = job
        pseed, rng = _trial_streams(seed, ei, t)
        if eps >= threshold:
            return TrialRecord(kind, n, eps, t, pseed, math.nan, math.nan, None, None, True)
        f = rng.standard_normal(n)
        f /= l2_norm(f)
        out = _perturb(op, kind, eps, pseed, dec, relative_mode)
        dec2 = eigendecompose(out.perturbed)
        y = apply_filter(h, dec, f).values
        y2 = apply_filter(h, dec2, f).values
        emp = l2_norm(y - y2) / l2_norm(f)
        b = filter_bound(consts, out.epsilon_measured)
        return TrialRecord(kind, n, eps, t, pseed, out.epsilon_measured, emp, b, bool(emp <= b + HOLD_SLACK))

    jobs = [(ei, e, t) for ei, e in enumerate(eps_list) for t in range(int(trials_per_eps))]
    return StabilityReport(kind, _run_trials(jobs, one, threads), consts)


# ---------------------------------------------------------------------------
# network experiment
# ---------------------------------------------------------------------------


class GraphInput(NamedTuple):
    cloud: Optional[PointCloud]
    op: DenseOperator
    dec: SpectralDecomposition
    X: np.ndarray
    label: Optional[int] = None


def fdt_network(dec: SpectralDecomposition, widths: Sequence[int], K: int, threshold: float, seed: int, nonlinearity: str = "relu") -> MnnModel:
    """Network whose filters are all designed alpha-FDT and normalized.

    Every filter gets group targets drawn uniformly from [-1, 1]; all-zero
    designs are replaced by the identity filter.  Filters are normalized over
    [0, 1.1 (lambda_max + threshold)], which covers the spectrum of every
    operator perturbed by less than the threshold.
    """
    part = partition_spectrum(dec, "alpha_difference", threshold)
    rng_ = (0.0, 1.1 * (float(dec.eigenvalues[-1]) + threshold))
    cfg = MnnConfig(tuple(widths), K, nonlinearity)
    rng = np.random.default_rng(seed)
    banks = []
    for l in range(cfg.n_layers):
        bank = np.zeros((widths[l + 1], widths[l], K))
        for p in range(widths[l + 1]):
            for q in range(widths[l]):
                res = design_filter(dec, part, rng.uniform(-1, 1, part.group_count), K, lambda_range=rng_)
                bank[p, q] = res.filter.taps if not res.zero_filter else np.eye(K)[0]
        banks.append(bank)
    return MnnModel(cfg, tuple(banks), np.ones(widths[-1]), 0.0, int(seed))


def network_constants(model: MnnModel, dec: SpectralDecomposition, kind: str, threshold: float, eps_max: float) -> List[Dict[str, object]]:
    out = []
    for l in range(model.config.n_layers):
        for row in model.filter_bank(l):
            for h in row:
                out.append(filter_constants(dec, h, kind, threshold, eps_max))
    return out


def run_mnn_stability_experiment(
    model: MnnModel,
    inputs: Sequence[GraphInput],
    kind: str,
    epsilons: Sequence[float],
    trials: int,
    seed: int,
    threshold: Optional[float] = None,
    alpha_kernel: float = 1.0,
    deformation: str = "gaussian_coordinate",
    coordinate_features: bool = True,
    threads: int = 1,
) -> StabilityReport:
    """Compare final-layer features before and after a perturbation.

    For ``kind`` in {"absolute", "relative"} the operator is perturbed
    directly and every trial is checked against L F^(L-1) C_per eps, where
    C_per is the largest per-filter bound divided by eps.  Sizes above
    threshold / 10 are skipped.  For ``kind="deformation"`` the point cloud
    is deformed, the graph rebuilt and the input features re-evaluated from
    the deformed coordinates when ``coordinate_features`` is set; no closed
    form bound applies, so ``bound`` and ``holds`` stay ``None`` and the
    record carries logit and decision changes instead.
    """
    cfg = model.config
    eps_list = [float(e) for e in epsilons]
    if kind in ("absolute", "relative"):
        if threshold is None:
            raise ConfigurationError("operator perturbations need a threshold")
        if cfg.layer_features[0] != 1 or cfg.layer_features[-1] != 1:
            raise ConfigurationError("bound checks need one input and one output feature")
        limit = threshold / 10
    elif kind == "deformation":
        limit = math.inf
    else:
        raise ConfigurationError(f"unknown perturbation kind {kind!r}")
    F = max(cfg.layer_features)
    Ln = cfg.n_layers
    eps_max = max([e for e in eps_list if e <= limit], default=0.0)
    per_input_consts = []
    if kind != "deformation":
        for g in inputs:
            cs = network_constants(model, g.dec, kind, threshold, eps_max)
            if max(c["sup_abs_response"] for c in cs) > 1 + 1e-9:
                raise PreconditionError("network filters are not normalized")
            per_input_consts.append(cs)

    base = []
    for g in inputs:
        fw = forward(model, g.dec, g.X)
        base.append(fw)

    def one(job):
        ei, eps, gi, t = job
        g = inputs[gi]
        pseed, _ = _trial_streams(seed, ei, gi * 1_000_003 + t)
        n = g.op.n
        if eps > limit:
            return TrialRecord(kind, n, eps, t, pseed, math.nan, math.nan, None, None, True)
        fw = base[gi]
        x0 = l2_norm(fw.features[0])
        if kind == "deformation":
            spec = DeformationSpec(deformation, eps, pseed)
            cloud2 = deform(g.cloud, spec)
            op2 = laplacian(build_graph(cloud2, alpha_kernel))
            dec2 = eigendecompose(op2)
            X2 = cloud2.points if coordinate_features else g.X
            fw2 = forward(model, dec2, X2)
            emp = l2_norm(fw.features[-1] - fw2.features[-1]) / max(x0, 1e-300)
            extra = {"logit_change": abs(fw.logit - fw2.logit), "decision_flip": float((fw.logit > 0) != (fw2.logit > 0))}
            if g.label is not None:
                extra["error_before"] = float((fw.logit > 0) != bool(g.label))
                extra["error_after"] = float((fw2.logit > 0) != bool(g.label))
            return TrialRecord(kind, n, eps, t, pseed, eps, emp, None, None, False, extra)
        out = _perturb(g.op, kind, eps, pseed, g.dec)
        dec2 = eigendecompose(out.perturbed)
        fw2 = forward(model, dec2, g.X)
        emp = l2_norm(fw.features[-1] - fw2.features[-1]) / max(x0, 1e-300)
        em = out.epsilon_measured
        c_per = max(filter_bound(c, em) for c in per_input_consts[gi]) / em if em > 0 else 0.0
        b = bound_mnn(BoundInputs(em, L_layers=Ln, F_width=F, C_per=c_per, kind=kind))
        return TrialRecord(kind, n, eps, t, pseed, em, emp, b, bool(emp <= b + HOLD_SLACK), False, {"C_per": c_per})

    jobs = [(ei, e, gi, t) for ei, e in enumerate(eps_list) for gi in range(len(inputs)) for t in range(int(trials))]
    consts = {"L_layers": Ln, "F_width": F, "threshold": threshold, "eps_limit": limit}
    return StabilityReport(kind, _run_trials(jobs, one, threads), consts)


# ---------------------------------------------------------------------------
# convergence
# ---------------------------------------------------------------------------


class ConvergenceRow(NamedTuple):
    n: int
    reference_n: int
    discrepancy: float


def run_convergence_experiment(
    kind: str,
    n_list: Sequence[int],
    h: FilterCoefficients,
    signal,
    seed: int,
    alpha_kernel: float = 1.0,
    reference: str = "successive",
) -> List[ConvergenceRow]:
    """Discrepancy of the graph filter output as the sample size grows.

    Each n gets its own cloud.  With ``reference="successive"`` the output
    at n is compared with the output at the next n in the list; with
    ``"finest"`` every n is compared with the largest one.  The reference
    output is moved to the coarser cloud by nearest-neighbour lookup and the
    difference measured in the coarse L2(G_n) norm.
    """
    ns = [int(v) for v in n_list]
    if len(ns) < 3:
        raise ConfigurationError("need at least three sample sizes")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ConfigurationError("sample sizes must be strictly ascending")
    if reference not in ("successive", "finest"):
        raise ConfigurationError(f"unknown reference {reference!r}")
    children = np.random.SeedSequence(int(seed)).spawn(len(ns))
    clouds, outs = [], []
    for n, child in zip(ns, children):
        cloud = sample_manifold(kind, n, int(child.generate_state(1, dtype=np.uint64)[0]))
        op = laplacian(build_graph(cloud, alpha_kernel))
        dec = eigendecompose(op)
        x = evaluate_signal(cloud, signal)
        clouds.append(cloud)
        outs.append(apply_filter(h, dec, x).values)
    rows = []
    for j in range(len(ns) - 1):
        r = j + 1 if reference == "successive" else len(ns) - 1
        _, nearest = cKDTree(clouds[r].points).query(clouds[j].points)
        diff = outs[j] - outs[r][nearest]
        rows.append(ConvergenceRow(ns[j], ns[r], l2_norm(diff)))
    return rows


def time_domain_filter(h: FilterCoefficients, L) -> np.ndarray:
    """sum_k h_k expm(-k L) built from scipy's matrix exponential (independent of the eigen path)."""
    a = _matrix(L)
    e1 = expm(-a)
    out = np.zeros_like(a)
    power = np.eye(a.shape[0])
    for k, hk in enumerate(h.taps):
        if k > 0:
            power = power @ e1
        out += hk * power
    return out


__all__ = [
    "BoundInputs",
    "bound_filter_absolute",
    "bound_filter_relative",
    "bound_mnn",
    "perturbation_constant",
    "check_weyl",
    "check_relative_eigenvalues",
    "check_davis_kahan",
    "StabilityReport",
    "TrialRecord",
    "run_filter_stability_experiment",
    "run_mnn_stability_experiment",
    "run_convergence_experiment",
    "GraphInput",
    "fdt_network",
    "filter_constants",
    "filter_bound",
    "ConvergenceRow",
    "time_domain_filter",
]
