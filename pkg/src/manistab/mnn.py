"""Multi-layer heat-kernel networks: forward pass, closed-form gradients, ADAM training."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigurationError, ContractError, DataError
from .filters import FilterCoefficients
from .geometry import SignalVector
from .spectral import SpectralDecomposition

NONLINEARITIES = ("relu", "abs", "tanh_normalized")
READOUTS = ("mean_pool_linear",)


@dataclass(frozen=True)
class MnnConfig:
    layer_features: Tuple[int, ...]
    taps_per_filter: int = 5
    nonlinearity: str = "relu"
    readout: str = "mean_pool_linear"

    def __post_init__(self):
        feats = tuple(int(f) for f in self.layer_features)
        if len(feats) < 2:
            raise ConfigurationError("need at least one layer (two feature counts)")
        if min(feats) < 1:
            raise ConfigurationError("feature counts must be positive")
        if int(self.taps_per_filter) < 1:
            raise ConfigurationError("taps_per_filter must be positive")
        if self.nonlinearity not in NONLINEARITIES:
            raise ConfigurationError(f"unknown nonlinearity {self.nonlinearity!r}")
        if self.readout not in READOUTS:
            raise ConfigurationError(f"unknown readout {self.readout!r}")
        object.__setattr__(self, "layer_features", feats)
        object.__setattr__(self, "taps_per_filter", int(self.taps_per_filter))

    @property
    def n_layers(self) -> int:
        return len(self.layer_features) - 1


@dataclass(frozen=True)
class MnnModel:
    """Filter banks plus an affine readout.

    ``taps[l]`` has shape (F_{l+1}, F_l, K): entry [p, q] is the filter
    mapping input feature q to output feature p of layer l + 1.
    """

    config: MnnConfig
    taps: Tuple[np.ndarray, ...]
    readout_weights: np.ndarray
    readout_bias: float
    seed: int = 0

    def __post_init__(self):
        cfg = self.config
        taps = tuple(np.array(t, dtype=np.float64) for t in self.taps)
        if len(taps) != cfg.n_layers:
            raise DataError(f"expected {cfg.n_layers} filter banks, got {len(taps)}")
        for l, t in enumerate(taps):
            want = (cfg.layer_features[l + 1], cfg.layer_features[l], cfg.taps_per_filter)
            if t.shape != want:
                raise DataError(f"bank {l} has shape {t.shape}, expected {want}")
        w = np.array(self.readout_weights, dtype=np.float64).reshape(-1)
        if w.size != cfg.layer_features[-1]:
            raise DataError("readout weight count must equal the last feature count")
        params = list(taps) + [w, np.array([self.readout_bias], dtype=float)]
        if not all(np.all(np.isfinite(p)) for p in params):
            raise DataError("model parameters must be finite")
        for t in taps:
            t.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "readout_weights", w)
        object.__setattr__(self, "readout_bias", float(self.readout_bias))

    def filter_bank(self, layer: int) -> List[List[FilterCoefficients]]:
        t = self.taps[layer]
        return [[FilterCoefficients(t[p, q]) for q in range(t.shape[1])] for p in range(t.shape[0])]

    def parameters(self) -> List[np.ndarray]:
        return [*self.taps, self.readout_weights, np.array([self.readout_bias])]

    def with_parameters(self, params: Sequence[np.ndarray]) -> "MnnModel":
        nl = self.config.n_layers
        return replace(self, taps=tuple(params[:nl]), readout_weights=params[nl], readout_bias=float(params[nl + 1][0]))


def init_model(config: MnnConfig, seed: int) -> MnnModel:
    """Taps ~ U[-1/(K F_in), 1/(K F_in)], readout weights ~ U[-1/F_L, 1/F_L], bias 0."""
    rng = np.random.default_rng(seed)
    K = config.taps_per_filter
    feats = config.layer_features
    taps = []
    for l in range(config.n_layers):
        b = 1.0 / (K * feats[l])
        taps.append(rng.uniform(-b, b, (feats[l + 1], feats[l], K)))
    w = rng.uniform(-1.0 / feats[-1], 1.0 / feats[-1], feats[-1])
    return MnnModel(config, tuple(taps), w, 0.0, int(seed))


# ---------------------------------------------------------------------------
# nonlinearities
# ---------------------------------------------------------------------------


def activation(name: str, z):
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "abs":
        return np.abs(z)
    if name == "tanh_normalized":
        return np.tanh(z)
    raise ConfigurationError(f"unknown nonlinearity {name!r}")


def activation_grad(name: str, z):
    if name == "relu":
        return (z > 0).astype(np.float64)
    if name == "abs":
        return np.sign(z)
    if name == "tanh_normalized":
        return 1.0 - np.tanh(z) ** 2
    raise ConfigurationError(f"unknown nonlinearity {name!r}")


# ---------------------------------------------------------------------------
# forward / backward
# ---------------------------------------------------------------------------


class ForwardResult(NamedTuple):
    features: List[np.ndarray]  # x_0 ... x_L, each (n, F_l)
    logit: float


class _Cache(NamedTuple):
    expk: np.ndarray  # (n, K) exp(-k lambda_i)
    xhat: List[np.ndarray]  # per layer input in the eigenbasis
    resp: List[np.ndarray]  # per layer (n, F_out, F_in) responses
    z: List[np.ndarray]  # pre-activations


def _signal(X, n, f0):
    v = X.values if isinstance(X, SignalVector) else np.asarray(X, dtype=np.float64)
    if v.ndim == 1:
        v = v[:, None]
    if v.shape != (n, f0):
        raise ContractError(f"input has shape {v.shape}, expected ({n}, {f0})")
    return v


def _forward(model, dec, X):
    cfg = model.config
    n = dec.n
    x = _signal(X, n, cfg.layer_features[0])
    phi = dec.eigenvectors
    expk = np.exp(-np.multiply.outer(dec.eigenvalues, np.arange(cfg.taps_per_filter)))
    feats, xhats, resps, zs = [x], [], [], []
    for t in model.taps:
        xhat = phi.T @ x
        resp = (expk @ t.reshape(-1, t.shape[2]).T).reshape(n, t.shape[0], t.shape[1])
        z = phi @ np.matmul(resp, xhat[:, :, None])[:, :, 0]
        x = activation(cfg.nonlinearity, z)
        feats.append(x)
        xhats.append(xhat)
        resps.append(resp)
        zs.append(z)
    logit = float(model.readout_weights @ feats[-1].mean(axis=0) + model.readout_bias)
    return ForwardResult(feats, logit), _Cache(expk, xhats, resps, zs)


def forward(model: MnnModel, dec: SpectralDecomposition, X) -> ForwardResult:
    """Run every layer x_l^p = sigma(sum_q h_l^{pq}(L) x_{l-1}^q) and the readout."""
    return _forward(model, dec, X)[0]


def _backward(model, dec, fwd, cache, dlogit):
    """Gradients of dlogit * logit with respect to every parameter."""
    cfg = model.config
    phi = dec.eigenvectors
    xl = fwd.features[-1]
    n = xl.shape[0]
    grads = [None] * cfg.n_layers
    gw = dlogit * xl.mean(axis=0)
    gb = dlogit
    dx = np.broadcast_to(dlogit * model.readout_weights / n, xl.shape)
    for l in range(cfg.n_layers - 1, -1, -1):
        dz = dx * activation_grad(cfg.nonlinearity, cache.z[l])
        dzhat = phi.T @ dz
        outer = (dzhat[:, :, None] * cache.xhat[l][:, None, :]).reshape(dzhat.shape[0], -1)
        grads[l] = (outer.T @ cache.expk).reshape(dzhat.shape[1], cache.xhat[l].shape[1], -1)
        if l > 0:
            dx = phi @ np.matmul(dzhat[:, None, :], cache.resp[l])[:, 0, :]
    return grads + [gw, np.array([gb])]


# ---------------------------------------------------------------------------
# loss, penalty
# ---------------------------------------------------------------------------


class Sample(NamedTuple):
    dec: SpectralDecomposition
    X: np.ndarray
    label: int


class LossResult(NamedTuple):
    loss: float
    gradients: List[np.ndarray]
    logits: np.ndarray


def bce_with_logit(logit: float, label: int) -> float:
    """-y log s(z) - (1 - y) log(1 - s(z)), computed stably."""
    return float(np.logaddexp(0.0, logit) - label * logit)


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


class PenaltyResult(NamedTuple):
    value: float
    gradients: List[np.ndarray]


def continuity_penalty(model: MnnModel, grid, a_target: float, b_target: float) -> PenaltyResult:
    """Hinge penalty on |hhat'| above A* and |lambda hhat'| above B*, summed over a grid and all filters.

    Parameters
    ----------
    model : MnnModel
    grid : array_like
        Frequencies at which the penalty is evaluated, e.g. a grid over the
        eigenvalues of the training graphs.
    a_target, b_target : float
        Targets A* and B*, both positive.
    """
    if not (a_target > 0 and b_target > 0):
        raise ConfigurationError("continuity targets must be positive")
    lam = np.asarray(grid, dtype=np.float64)
    k = np.arange(model.config.taps_per_filter)
    dmat = -k * np.exp(-np.multiply.outer(lam, k))  # (G, K): hhat' = dmat @ h
    total = 0.0
    grads = []
    for t in model.taps:
        a = t @ dmat.T  # (Fo, Fi, G)
        la = a * lam
        ea = np.maximum(np.abs(a) - a_target, 0.0)
        eb = np.maximum(np.abs(la) - b_target, 0.0)
        total += float(np.sum(ea**2) + np.sum(eb**2))
        coef = 2 * ea * np.sign(a) + 2 * eb * np.sign(la) * lam
        grads.append(coef @ dmat)
    return PenaltyResult(total, grads + [np.zeros_like(model.readout_weights), np.zeros(1)])


def penalty_grid(decs: Sequence[SpectralDecomposition], points: int = 64, pad: float = 1.1) -> np.ndarray:
    top = max(float(d.eigenvalues[-1]) for d in decs)
    return np.linspace(0.0, pad * max(top, 0.0), points)


def loss_and_gradients(
    model: MnnModel,
    batch: Sequence[Sample],
    regularizer_weight: float = 0.0,
    a_target: float = 1.0,
    b_target: float = 1.0,
    grid=None,
) -> LossResult:
    """Mean binary cross-entropy over ``batch`` plus an optional continuity penalty."""
    if len(batch) == 0:
        raise ConfigurationError("batch must not be empty")
    params = model.parameters()
    grads = [np.zeros_like(p) for p in params]
    terms = []
    logits = np.empty(len(batch))
    for j, s in enumerate(batch):
        fwd, cache = _forward(model, s.dec, s.X)
        logits[j] = fwd.logit
        terms.append(bce_with_logit(fwd.logit, s.label))
        g = _backward(model, s.dec, fwd, cache, float(_sigmoid(fwd.logit)) - s.label)
        for acc, gi in zip(grads, g):
            acc += gi
    m = len(batch)
    # fsum is correctly rounded, so the loss does not depend on batch order
    loss = math.fsum(terms) / m
    grads = [g / m for g in grads]
    if regularizer_weight > 0:
        if grid is None:
            grid = penalty_grid([s.dec for s in batch])
        pen = continuity_penalty(model, grid, a_target, b_target)
        loss += regularizer_weight * pen.value
        grads = [g + regularizer_weight * pg for g, pg in zip(grads, pen.gradients)]
    return LossResult(float(loss), grads, logits)


# ---------------------------------------------------------------------------
# training
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.005
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    batch_size: int = 10
    epochs: int = 40
    regularizer_weight: float = 0.0
    lipschitz_target: float = 1.0
    integral_lipschitz_target: float = 1.0
    seed: int = 0

    def __post_init__(self):
        for name in ("learning_rate", "adam_beta1", "adam_beta2"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ConfigurationError(f"{name} must lie in (0, 1), got {v}")
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigurationError("epochs and batch_size must be positive")
        if self.regularizer_weight < 0:
            raise ConfigurationError("regularizer_weight must be nonnegative")
        if not (self.lipschitz_target > 0 and self.integral_lipschitz_target > 0):
            raise ConfigurationError("continuity targets must be positive")


@dataclass
class Adam:
    """ADAM with bias correction over a list of parameter arrays."""

    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step_count: int = 0
    m: Optional[List[np.ndarray]] = field(default=None, repr=False)
    v: Optional[List[np.ndarray]] = field(default=None, repr=False)

    def step(self, params, grads):
        if self.m is None:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]
        self.step_count += 1
        c1 = 1 - self.beta1**self.step_count
        c2 = 1 - self.beta2**self.step_count
        out = []
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1 - self.beta1) * g
            v *= self.beta2
            v += (1 - self.beta2) * g * g
            out.append(p - self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps))
        return out


class TrainResult(NamedTuple):
    model: MnnModel
    loss_curve: List[float]
    error_history: List[float]


def train(model: MnnModel, dataset: Sequence[Sample], cfg: TrainConfig, grid=None) -> TrainResult:
    """Mini-batch ADAM on binary cross-entropy.

    Each epoch visits the data in a fresh permutation drawn from ``cfg.seed``;
    the recorded loss and error are averages over the batches as they were
    visited, and the error thresholds the logit at 0.
    """
    if len(dataset) == 0:
        raise ConfigurationError("dataset must not be empty")
    rng = np.random.default_rng(cfg.seed)
    if cfg.regularizer_weight > 0 and grid is None:
        grid = penalty_grid([s.dec for s in dataset])
    opt = Adam(cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon)
    losses, errors = [], []
    for _ in range(cfg.epochs):
        order = rng.permutation(len(dataset))
        total, wrong = 0.0, 0
        for start in range(0, len(order), cfg.batch_size):
            batch = [dataset[i] for i in order[start : start + cfg.batch_size]]
            res = loss_and_gradients(
                model, batch, cfg.regularizer_weight, cfg.lipschitz_target, cfg.integral_lipschitz_target, grid
            )
            total += res.loss * len(batch)
            labels = np.array([s.label for s in batch])
            wrong += int(np.sum((res.logits > 0).astype(int) != labels))
            model = model.with_parameters(opt.step(model.parameters(), res.gradients))
        losses.append(total / len(dataset))
        errors.append(wrong / len(dataset))
    return TrainResult(model, losses, errors)


def predict(model: MnnModel, dataset: Sequence[Sample]) -> np.ndarray:
    return np.array([forward(model, s.dec, s.X).logit for s in dataset])


def error_rate(model: MnnModel, dataset: Sequence[Sample]) -> float:
    logits = predict(model, dataset)
    labels = np.array([s.label for s in dataset])
    return float(np.mean((logits > 0).astype(int) != labels))


def gradient_check(model: MnnModel, batch: Sequence[Sample], step: float = 1e-5, **loss_kwargs) -> float:
    """Worst relative gap between analytic and central-difference gradients.

    The relative gap of one parameter is |a - f| / max(|a|, |f|), taken as 0
    when both vanish.
    """
    analytic = loss_and_gradients(model, batch, **loss_kwargs).gradients
    params = model.parameters()
    worst = 0.0
    for i, p in enumerate(params):
        for idx in np.ndindex(p.shape):
            vals = []
            for sign in (1.0, -1.0):
                q = [a.copy() for a in params]
                q[i][idx] += sign * step
                vals.append(loss_and_gradients(model.with_parameters(q), batch, **loss_kwargs).loss)
            fd = (vals[0] - vals[1]) / (2 * step)
            a = analytic[i][idx]
            scale = max(abs(a), abs(fd))
            if scale > 0:
                worst = max(worst, abs(a - fd) / scale)
    return worst
